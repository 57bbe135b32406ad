#include "lfm2/term.h"

#include <atomic>
#include <functional>

namespace lfm2 {

TermP mk_type() {
  static const TermP type_node = std::make_shared<const Term>();
  return type_node;
}

TermP mk_pi(std::string hint, TermP dom, TermP body) {
  auto t = std::make_shared<Term>();
  t->node = Node::Pi;
  t->hint = std::move(hint);
  t->dom = std::move(dom);
  t->body = std::move(body);
  return t;
}

TermP mk_lam(std::string hint, TermP dom, TermP body) {
  auto t = std::make_shared<Term>();
  t->node = Node::Lam;
  t->hint = std::move(hint);
  t->dom = std::move(dom);
  t->body = std::move(body);
  return t;
}

TermP mk_app(const Head& head, std::vector<TermP> args) {
  auto t = std::make_shared<Term>();
  t->node = Node::App;
  t->head = head;
  t->args = std::move(args);
  return t;
}

TermP mk_const(std::string name, std::vector<TermP> args) {
  Head h;
  h.kind = HeadKind::Const;
  h.name = std::move(name);
  return mk_app(h, std::move(args));
}

TermP mk_free(std::string name, std::vector<TermP> args) {
  Head h;
  h.kind = HeadKind::Free;
  h.name = std::move(name);
  return mk_app(h, std::move(args));
}

TermP mk_bound(int index, std::vector<TermP> args) {
  Head h;
  h.kind = HeadKind::Bound;
  h.index = index;
  return mk_app(h, std::move(args));
}

TermP mk_redex(TermP head, std::vector<TermP> args) {
  Head h;
  h.kind = HeadKind::Redex;
  h.term = std::move(head);
  return mk_app(h, std::move(args));
}

TermP mk_arrow(TermP dom, TermP cod) {
  // The codomain is lifted past the new binder. Terms built by callers are
  // locally closed, so lifting is the identity.
  return mk_pi("", std::move(dom), std::move(cod));
}

namespace {
std::atomic<unsigned long> temp_counter{0};
}

std::string temp_name() { return "\x01t" + std::to_string(temp_counter.fetch_add(1)); }

bool is_temp_name(const std::string& name) { return !name.empty() && name[0] == '\x01'; }

namespace {

// Replace Bound(depth) heads by the free variable `name`.
TermP open_at(const TermP& t, int depth, const std::string& name) {
  switch (t->node) {
    case Node::Type:
      return t;
    case Node::Pi:
    case Node::Lam: {
      TermP d = t->dom ? open_at(t->dom, depth, name) : nullptr;
      TermP b = open_at(t->body, depth + 1, name);
      if (d == t->dom && b == t->body) return t;
      return t->node == Node::Pi ? mk_pi(t->hint, d, b) : mk_lam(t->hint, d, b);
    }
    case Node::App: {
      bool changed = false;
      std::vector<TermP> args;
      args.reserve(t->args.size());
      for (auto& a : t->args) {
        args.push_back(open_at(a, depth, name));
        changed |= args.back() != a;
      }
      Head h = t->head;
      if (h.kind == HeadKind::Bound && h.index == depth) {
        h.kind = HeadKind::Free;
        h.name = name;
        h.index = 0;
        changed = true;
      } else if (h.kind == HeadKind::Redex) {
        TermP ht = open_at(h.term, depth, name);
        changed |= ht != h.term;
        h.term = ht;
      }
      if (!changed) return t;
      return mk_app(h, std::move(args));
    }
  }
  return t;
}

TermP close_at(const TermP& t, int depth, const std::string& name) {
  switch (t->node) {
    case Node::Type:
      return t;
    case Node::Pi:
    case Node::Lam: {
      TermP d = t->dom ? close_at(t->dom, depth, name) : nullptr;
      TermP b = close_at(t->body, depth + 1, name);
      if (d == t->dom && b == t->body) return t;
      return t->node == Node::Pi ? mk_pi(t->hint, d, b) : mk_lam(t->hint, d, b);
    }
    case Node::App: {
      bool changed = false;
      std::vector<TermP> args;
      args.reserve(t->args.size());
      for (auto& a : t->args) {
        args.push_back(close_at(a, depth, name));
        changed |= args.back() != a;
      }
      Head h = t->head;
      if (h.kind == HeadKind::Free && h.name == name) {
        h.kind = HeadKind::Bound;
        h.index = depth;
        h.name.clear();
        changed = true;
      } else if (h.kind == HeadKind::Redex) {
        TermP ht = close_at(h.term, depth, name);
        changed |= ht != h.term;
        h.term = ht;
      }
      if (!changed) return t;
      return mk_app(h, std::move(args));
    }
  }
  return t;
}

bool mentions_any(const TermP& t, const SubstMap& map) {
  switch (t->node) {
    case Node::Type:
      return false;
    case Node::Pi:
    case Node::Lam:
      return (t->dom && mentions_any(t->dom, map)) || mentions_any(t->body, map);
    case Node::App:
      if (t->head.kind == HeadKind::Free && map.count(t->head.name)) return true;
      if (t->head.kind == HeadKind::Redex) return true;
      for (auto& a : t->args)
        if (mentions_any(a, map)) return true;
      return false;
  }
  return false;
}

}  // namespace

TermP open(const TermP& body, const std::string& name) { return open_at(body, 0, name); }
TermP close(const TermP& t, const std::string& name) { return close_at(t, 0, name); }

TermP happly(const TermP& f, const std::vector<TermP>& args) {
  TermP cur = f;
  for (size_t i = 0; i < args.size(); ++i) {
    if (cur->node == Node::Lam) {
      cur = instantiate(cur->body, args[i]);
    } else if (cur->node == Node::App) {
      std::vector<TermP> spine = cur->args;
      spine.insert(spine.end(), args.begin() + static_cast<long>(i), args.end());
      return mk_app(cur->head, std::move(spine));
    } else {
      throw LfError("apply", "cannot apply a non-function term " + show(cur));
    }
  }
  return cur;
}

TermP hsubst(const TermP& t, const SubstMap& map) {
  if (map.empty() || !mentions_any(t, map)) return t;
  switch (t->node) {
    case Node::Type:
      return t;
    case Node::Pi:
    case Node::Lam: {
      TermP d = t->dom ? hsubst(t->dom, map) : nullptr;
      std::string u = temp_name();
      TermP b = close(hsubst(open(t->body, u), map), u);
      return t->node == Node::Pi ? mk_pi(t->hint, d, b) : mk_lam(t->hint, d, b);
    }
    case Node::App: {
      std::vector<TermP> args;
      args.reserve(t->args.size());
      for (auto& a : t->args) args.push_back(hsubst(a, map));
      if (t->head.kind == HeadKind::Free) {
        auto it = map.find(t->head.name);
        if (it != map.end()) return happly(it->second, args);
      }
      if (t->head.kind == HeadKind::Redex) return happly(hsubst(t->head.term, map), args);
      return mk_app(t->head, std::move(args));
    }
  }
  return t;
}

TermP hsubst1(const TermP& t, const std::string& name, const TermP& value) {
  SubstMap m;
  m.emplace(name, value);
  return hsubst(t, m);
}

TermP instantiate(const TermP& body, const TermP& value) {
  std::string u = temp_name();
  return hsubst1(open(body, u), u, value);
}

bool alpha_eq(const TermP& a, const TermP& b) {
  if (a == b) return true;
  if (a->node != b->node) return false;
  switch (a->node) {
    case Node::Type:
      return true;
    case Node::Pi:
    case Node::Lam:
      // A missing lambda annotation compares equal to any annotation.
      if (a->dom && b->dom && !alpha_eq(a->dom, b->dom)) return false;
      return alpha_eq(a->body, b->body);
    case Node::App: {
      const Head& x = a->head;
      const Head& y = b->head;
      if (x.kind != y.kind) return false;
      switch (x.kind) {
        case HeadKind::Const:
        case HeadKind::Free:
          if (x.name != y.name) return false;
          break;
        case HeadKind::Bound:
          if (x.index != y.index) return false;
          break;
        case HeadKind::Redex:
          if (!alpha_eq(x.term, y.term)) return false;
          break;
      }
      if (a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_eq(a->args[i], b->args[i])) return false;
      return true;
    }
  }
  return false;
}

void collect_free_vars(const TermP& t, std::vector<std::string>& out, std::set<std::string>& seen) {
  switch (t->node) {
    case Node::Type:
      return;
    case Node::Pi:
    case Node::Lam:
      if (t->dom) collect_free_vars(t->dom, out, seen);
      collect_free_vars(t->body, out, seen);
      return;
    case Node::App:
      if (t->head.kind == HeadKind::Free && seen.insert(t->head.name).second) out.push_back(t->head.name);
      if (t->head.kind == HeadKind::Redex) collect_free_vars(t->head.term, out, seen);
      for (auto& a : t->args) collect_free_vars(a, out, seen);
      return;
  }
}

std::vector<std::string> free_vars(const TermP& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_free_vars(t, out, seen);
  return out;
}

bool occurs_free(const TermP& t, const std::string& name) {
  switch (t->node) {
    case Node::Type:
      return false;
    case Node::Pi:
    case Node::Lam:
      return (t->dom && occurs_free(t->dom, name)) || occurs_free(t->body, name);
    case Node::App:
      if (t->head.kind == HeadKind::Free && t->head.name == name) return true;
      if (t->head.kind == HeadKind::Redex && occurs_free(t->head.term, name)) return true;
      for (auto& a : t->args)
        if (occurs_free(a, name)) return true;
      return false;
  }
  return false;
}

void collect_consts(const TermP& t, std::set<std::string>& out) {
  switch (t->node) {
    case Node::Type:
      return;
    case Node::Pi:
    case Node::Lam:
      if (t->dom) collect_consts(t->dom, out);
      collect_consts(t->body, out);
      return;
    case Node::App:
      if (t->head.kind == HeadKind::Const) out.insert(t->head.name);
      if (t->head.kind == HeadKind::Redex) collect_consts(t->head.term, out);
      for (auto& a : t->args) collect_consts(a, out);
      return;
  }
}

int pi_arity(const TermP& t) {
  int n = 0;
  for (TermP cur = t; cur->node == Node::Pi; cur = cur->body) ++n;
  return n;
}

TermP pi_target(const TermP& t) {
  TermP cur = t;
  while (cur->node == Node::Pi) cur = cur->body;
  return cur;
}

std::optional<std::string> as_eta_var(const TermP& t) {
  // [x1]..[xk] v x1 .. xk  with v free.
  std::vector<std::string> bound;
  TermP cur = t;
  while (cur->node == Node::Lam) {
    std::string u = temp_name();
    bound.push_back(u);
    cur = open(cur->body, u);
  }
  if (cur->node != Node::App || cur->head.kind != HeadKind::Free) return std::nullopt;
  if (cur->args.size() != bound.size()) return std::nullopt;
  for (size_t i = 0; i < bound.size(); ++i) {
    auto v = as_eta_var(cur->args[i]);
    if (!v || *v != bound[i]) return std::nullopt;
  }
  for (auto& b : bound)
    if (b == cur->head.name) return std::nullopt;
  return cur->head.name;
}

}  // namespace lfm2
