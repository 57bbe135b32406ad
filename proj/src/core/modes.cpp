#include "lfm2/modes.h"

namespace lfm2 {

int ModedFamily::param_index(const std::string& name) const {
  for (size_t i = 0; i < params.size(); ++i)
    if (params[i].name == name) return static_cast<int>(i);
  return -1;
}

Context ModedFamily::inputs() const {
  Context c;
  for (int i : input_order) c.push(params[static_cast<size_t>(i)].name, params[static_cast<size_t>(i)].type);
  return c;
}

Context ModedFamily::outputs() const {
  Context c;
  for (int i : output_order) c.push(params[static_cast<size_t>(i)].name, params[static_cast<size_t>(i)].type);
  return c;
}

TermP ModedFamily::apply(const SubstMap& values) const {
  std::vector<TermP> args;
  SubstMap inst;
  for (auto& p : params) {
    auto it = values.find(p.name);
    TermP a = it != values.end() ? it->second : eta_var(p.name, hsubst(p.type, inst));
    inst[p.name] = a;
    args.push_back(a);
  }
  return mk_const(family, std::move(args));
}

}  // namespace lfm2

namespace lfm2 {

ModedFamily elaborate_mode(const std::string& family, const Signature& sig, const std::vector<ModeLabel>& explicit_modes) {
  const Decl* d = sig.find(family);
  if (!d || d->kind != DeclKind::Family) throw TotalityError("IllDefinedMode", "'" + family + "' is not a type family");
  int arity = pi_arity(d->type);
  int implicit = d->implicit_count;
  if (static_cast<int>(explicit_modes.size()) != arity - implicit)
    throw TotalityError("IllDefinedMode", "mode declaration for '" + family + "' has " +
                                              std::to_string(explicit_modes.size()) + " parameters, expected " +
                                              std::to_string(arity - implicit));
  ModedFamily mf;
  mf.family = family;
  std::set<std::string> used;
  for (auto& m : explicit_modes) {
    if (!used.insert(m.name).second) throw TotalityError("IllDefinedMode", "duplicate mode label '" + m.name + "'");
  }
  TermP cur = d->type;
  for (int i = 0; i < arity; ++i) {
    FamilyParam p;
    p.implicit = i < implicit;
    if (p.implicit) {
      std::string base = cur->hint.empty() ? "X" : cur->hint;
      p.name = base;
      for (int k = 1; used.count(p.name); ++k) p.name = base + std::to_string(k);
      used.insert(p.name);
    } else {
      const ModeLabel& m = explicit_modes[static_cast<size_t>(i - implicit)];
      p.name = m.name;
      p.input = m.input;
    }
    p.type = cur->dom;
    mf.params.push_back(p);
    cur = open(cur->body, p.name);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& p : mf.params) {
      if (!p.input) continue;
      for (auto& v : free_vars(p.type)) {
        int j = mf.param_index(v);
        if (j >= 0 && mf.params[static_cast<size_t>(j)].implicit && !mf.params[static_cast<size_t>(j)].input) {
          mf.params[static_cast<size_t>(j)].input = true;
          changed = true;
        }
      }
    }
  }
  for (auto& p : mf.params) {
    if (!p.input) continue;
    for (auto& v : free_vars(p.type)) {
      int j = mf.param_index(v);
      if (j >= 0 && !mf.params[static_cast<size_t>(j)].input)
        throw TotalityError("IllDefinedMode", "input parameter " + p.name + " depends on output parameter " + v);
    }
  }
  for (size_t i = 0; i < mf.params.size(); ++i) (mf.params[i].input ? mf.input_order : mf.output_order).push_back(static_cast<int>(i));
  TermP k = mk_type();
  std::vector<int> all = mf.input_order;
  all.insert(all.end(), mf.output_order.begin(), mf.output_order.end());
  for (size_t i = all.size(); i-- > 0;) {
    const FamilyParam& p = mf.params[static_cast<size_t>(all[i])];
    k = mk_pi(p.name, p.type, close(k, p.name));
  }
  mf.elaborated_kind = k;
  return mf;
}

}  // namespace lfm2
