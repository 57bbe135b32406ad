#include "lfm2/lf.h"

#include <algorithm>

namespace lfm2 {

const TermP* Context::lookup(const std::string& name) const {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (it->name == name) return &it->type;
  return nullptr;
}

long Context::index_of(const std::string& name) const {
  for (size_t i = 0; i < entries.size(); ++i)
    if (entries[i].name == name) return static_cast<long>(i);
  return -1;
}

std::vector<std::string> Context::names() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(e.name);
  return out;
}

Context concat(const Context& a, const Context& b) {
  Context c = a;
  c.entries.insert(c.entries.end(), b.entries.begin(), b.entries.end());
  return c;
}

const Decl* Signature::find(const std::string& name) const {
  auto it = index.find(name);
  return it == index.end() ? nullptr : &decls[it->second];
}

void Signature::add(Decl d) {
  if (index.count(d.name)) throw LfError("signature", "duplicate declaration of " + d.name);
  index.emplace(d.name, decls.size());
  decls.push_back(std::move(d));
}

bool Signature::is_family(const std::string& name) const {
  const Decl* d = find(name);
  return d && d->kind == DeclKind::Family;
}

const TermP* Subst::lookup(const std::string& name) const {
  for (auto& b : binds)
    if (b.var == name) return &b.term;
  return nullptr;
}

void Subst::set(const std::string& name, TermP term) {
  for (auto& b : binds)
    if (b.var == name) {
      b.term = std::move(term);
      return;
    }
  binds.push_back({name, std::move(term)});
}

SubstMap Subst::map() const {
  SubstMap m;
  for (auto& b : binds) m[b.var] = b.term;
  return m;
}

TermP apply_subst(const TermP& t, const Subst& s) { return hsubst(t, s.map()); }

Context apply_subst(const Context& c, const Subst& s) {
  SubstMap m = s.map();
  Context out;
  for (auto& e : c.entries) out.push(e.name, hsubst(e.type, m));
  return out;
}

Subst compose_subst(const Subst& s1, const Subst& s2) {
  SubstMap m = s2.map();
  Subst out;
  for (auto& b : s1.binds) out.binds.push_back({b.var, hsubst(b.term, m)});
  return out;
}

Subst compose_subst(const Subst& s1, const Subst& s2, const Context& s1_domain) {
  SubstMap m = s2.map();
  Subst out;
  SubstMap prefix;
  for (auto& e : s1_domain.entries) {
    const TermP* bound = s1.lookup(e.name);
    if (bound) {
      out.binds.push_back({e.name, hsubst(*bound, m)});
    } else {
      auto it = m.find(e.name);
      if (it != m.end()) out.binds.push_back({e.name, it->second});
    }
  }
  for (auto& b : s1.binds)
    if (!s1_domain.contains(b.var)) out.binds.push_back({b.var, hsubst(b.term, m)});
  return out;
}

Subst restrict_subst(const Subst& s, const std::vector<std::string>& names) {
  Subst out;
  for (auto& b : s.binds)
    if (std::find(names.begin(), names.end(), b.var) != names.end()) out.binds.push_back(b);
  return out;
}

void check_subst_typing(const Context& ctx, const Signature& sig, const Subst& s, const Context& target) {
  SubstMap prefix;
  for (auto& e : target.entries) {
    TermP want = hsubst(e.type, prefix);
    const TermP* bound = s.lookup(e.name);
    TermP m = bound ? *bound : eta_var(e.name, want);
    try {
      check_object(ctx, sig, m, want);
    } catch (const LfError& err) {
      throw LfError("subst-typ", std::string("binding for ") + e.name + ": " + err.what(), e.name);
    }
    prefix[e.name] = m;
  }
}

std::vector<std::string> dependency_closure(const Context& ctx, const std::vector<std::string>& seeds) {
  std::set<std::string> need(seeds.begin(), seeds.end());
  // Walk right to left: a needed variable pulls in the free variables of its type.
  for (auto it = ctx.entries.rbegin(); it != ctx.entries.rend(); ++it) {
    if (!need.count(it->name)) continue;
    for (auto& v : free_vars(it->type)) need.insert(v);
  }
  std::vector<std::string> out;
  for (auto& e : ctx.entries)
    if (need.count(e.name)) out.push_back(e.name);
  return out;
}

Context minimal_domain_context(const Subst& s, const Context& target, const Context& ambient) {
  std::vector<std::string> seeds;
  for (auto& e : target.entries) {
    const TermP* bound = s.lookup(e.name);
    if (bound) {
      for (auto& v : free_vars(*bound)) seeds.push_back(v);
    } else {
      seeds.push_back(e.name);
    }
  }
  auto names = dependency_closure(ambient, seeds);
  Context out;
  for (auto& n : names) out.push(n, *ambient.lookup(n));
  return out;
}

std::string name_base(const std::string& name) {
  if (name.empty() || is_temp_name(name)) return "x";
  auto pos = name.find('#');
  std::string base = pos == std::string::npos ? name : name.substr(0, pos);
  return base.empty() ? "x" : base;
}

unsigned long name_suffix(const std::string& name) {
  auto pos = name.rfind('#');
  if (pos == std::string::npos || pos + 1 >= name.size()) return 0;
  unsigned long v = 0;
  for (size_t i = pos + 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9') return 0;
    v = v * 10 + static_cast<unsigned long>(name[i] - '0');
  }
  return v;
}

std::string NameSupply::fresh(const std::string& hint) { return name_base(hint) + "#" + std::to_string(next++); }

}  // namespace lfm2
