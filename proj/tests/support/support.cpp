#include "support.h"

#include <algorithm>
#include <functional>
#include <map>

namespace lfm2::test {

namespace {

std::string oracle_name() {
  static unsigned long n = 0;
  return "\x02o" + std::to_string(++n);
}

TermP nsub(const TermP& t, int k, const TermP& v);

}  // namespace

TermP naive_apply(TermP f, const std::vector<TermP>& args) {
  size_t i = 0;
  while (i < args.size() && f->node == Node::Lam) f = naive_instantiate(f->body, args[i++]);
  if (i == args.size()) return f;
  if (f->node != Node::App) throw std::logic_error("naive_apply: ill-typed application");
  std::vector<TermP> all = f->args;
  all.insert(all.end(), args.begin() + static_cast<long>(i), args.end());
  return mk_app(f->head, std::move(all));
}

namespace {

// Adds `d` to every bound index at or above `cutoff`.
TermP shift(const TermP& t, int d, int cutoff) {
  if (d == 0) return t;
  switch (t->node) {
    case Node::Type:
      return t;
    case Node::Pi:
      return mk_pi(t->hint, shift(t->dom, d, cutoff), shift(t->body, d, cutoff + 1));
    case Node::Lam:
      return mk_lam(t->hint, t->dom ? shift(t->dom, d, cutoff) : nullptr, shift(t->body, d, cutoff + 1));
    case Node::App: {
      std::vector<TermP> args;
      for (auto& a : t->args) args.push_back(shift(a, d, cutoff));
      if (t->head.kind == HeadKind::Bound && t->head.index >= cutoff) return mk_bound(t->head.index + d, std::move(args));
      return mk_app(t->head, std::move(args));
    }
  }
  return t;
}

// Replaces index k by `v` (given relative to the outside of the removed
// binder) and closes the gap.
TermP nsub(const TermP& t, int k, const TermP& v) {
  switch (t->node) {
    case Node::Type:
      return t;
    case Node::Pi:
      return mk_pi(t->hint, nsub(t->dom, k, v), nsub(t->body, k + 1, v));
    case Node::Lam:
      return mk_lam(t->hint, t->dom ? nsub(t->dom, k, v) : nullptr, nsub(t->body, k + 1, v));
    case Node::App: {
      std::vector<TermP> args;
      for (auto& a : t->args) args.push_back(nsub(a, k, v));
      if (t->head.kind == HeadKind::Bound) {
        if (t->head.index == k) return naive_apply(shift(v, k, 0), args);
        if (t->head.index > k) return mk_bound(t->head.index - 1, std::move(args));
      }
      return mk_app(t->head, std::move(args));
    }
  }
  return t;
}

std::string target_family(const TermP& type) {
  TermP t = pi_target(type);
  return t->node == Node::App && t->head.kind == HeadKind::Const ? t->head.name : "";
}

bool nmatch(const TermP& p, const TermP& t, const std::set<std::string>& pv, std::set<std::string>& bound,
            SubstMap& out) {
  if (p->node == Node::Lam) {
    if (t->node != Node::Lam) return false;
    std::string n = oracle_name();
    bound.insert(n);
    bool ok = nmatch(naive_instantiate(p->body, mk_free(n)), naive_instantiate(t->body, mk_free(n)), pv, bound, out);
    bound.erase(n);
    return ok;
  }
  if (p->node != Node::App) return struct_eq(p, t);
  if (p->head.kind == HeadKind::Free && pv.count(p->head.name)) {
    std::vector<std::string> xs;
    for (auto& a : p->args) {
      if (a->node != Node::App || a->head.kind != HeadKind::Free || !a->args.empty() || !bound.count(a->head.name))
        return false;
      if (std::find(xs.begin(), xs.end(), a->head.name) != xs.end()) return false;
      xs.push_back(a->head.name);
    }
    TermP value = t;
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) value = mk_lam("x", nullptr, close(value, *it));
    for (auto& fv : free_vars(value))
      if (bound.count(fv)) return false;
    auto prev = out.find(p->head.name);
    if (prev != out.end()) return struct_eq(prev->second, value);
    out[p->head.name] = value;
    return true;
  }
  if (t->node != Node::App || p->head.kind != t->head.kind || p->head.name != t->head.name ||
      p->args.size() != t->args.size())
    return false;
  for (size_t i = 0; i < p->args.size(); ++i)
    if (!nmatch(p->args[i], t->args[i], pv, bound, out)) return false;
  return true;
}

}  // namespace

std::string fixture_path(const std::string& name) { return std::string(LFM2_FIXTURE_DIR) + "/" + name; }

SourceFile load_fixture(const std::string& name) { return parse_source(read_file(fixture_path(name))); }

SourceFile parse_text(const std::string& text) { return parse_source(text); }

TermP term(const Signature& sig, const std::string& text, const std::set<std::string>& vars) {
  TokenStream ts(tokenize(text));
  return read_term(ts, sig, vars);
}

TermP term(const SourceFile& src, const std::string& text, const std::set<std::string>& vars) {
  return term(src.sig, text, vars);
}

Context context(const Signature& sig, const std::string& text) {
  TokenStream ts(tokenize(text + ")"));
  return read_context(ts, sig, {});
}

ModedFamily moded_family(const SourceFile& src, const std::string& family) {
  const ModeSpec* ms = nullptr;
  for (auto& m : src.modes)
    if (m.family == family) ms = &m;
  if (!ms) throw std::logic_error("no mode for " + family);
  return elaborate_mode(family, src.sig, ms->params);
}

Pipeline run_pipeline(const std::string& fixture) {
  Pipeline p;
  p.src = load_fixture(fixture);
  p.supply = seeded_supply(p.src.sig);
  for (auto& t : p.src.totals) {
    ModedFamily mf = moded_family(p.src, t.family);
    p.results.push_back(check_totality(mf, resolve_order(t, mf), p.src.sig, p.supply));
  }
  for (auto& r : p.results) p.proofs.push_back(generate(r, p.src.sig, p.supply));
  return p;
}

bool struct_eq(const TermP& a, const TermP& b) {
  if (a->node != b->node) return false;
  switch (a->node) {
    case Node::Type:
      return true;
    case Node::Pi:
      return struct_eq(a->dom, b->dom) && struct_eq(a->body, b->body);
    case Node::Lam:
      return struct_eq(a->body, b->body);
    case Node::App:
      if (a->head.kind != b->head.kind || a->args.size() != b->args.size()) return false;
      if (a->head.kind == HeadKind::Bound ? a->head.index != b->head.index : a->head.name != b->head.name)
        return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!struct_eq(a->args[i], b->args[i])) return false;
      return true;
  }
  return false;
}

TermP naive_instantiate(const TermP& body, const TermP& value) { return nsub(body, 0, value); }

bool naive_check(const Signature& sig, const Context& ctx, const TermP& m, const TermP& a) {
  if (m->node == Node::Lam) {
    if (a->node != Node::Pi) return false;
    if (m->dom && !struct_eq(m->dom, a->dom)) return false;
    std::string n = oracle_name();
    Context next = ctx;
    next.push(n, a->dom);
    return naive_check(sig, next, naive_instantiate(m->body, mk_free(n)), naive_instantiate(a->body, mk_free(n)));
  }
  if (m->node != Node::App) return false;
  TermP t;
  if (m->head.kind == HeadKind::Const) {
    const Decl* d = sig.find(m->head.name);
    if (!d || d->kind != DeclKind::Object) return false;
    t = d->type;
  } else if (m->head.kind == HeadKind::Free) {
    const TermP* ty = ctx.lookup(m->head.name);
    if (!ty) return false;
    t = *ty;
  } else {
    return false;
  }
  for (auto& arg : m->args) {
    if (t->node != Node::Pi || !naive_check(sig, ctx, arg, t->dom)) return false;
    t = naive_instantiate(t->body, arg);
  }
  return t->node == Node::App && a->node == Node::App && struct_eq(t, a);
}

std::vector<TermP> enumerate_objects(const Signature& sig, const Context& ctx, const TermP& type, int depth) {
  std::vector<TermP> out;
  if (type->node == Node::Pi) {
    std::string n = oracle_name();
    Context next = ctx;
    next.push(n, type->dom);
    for (auto& b : enumerate_objects(sig, next, naive_instantiate(type->body, mk_free(n)), depth))
      out.push_back(mk_lam(type->hint.empty() ? "x" : type->hint, type->dom, close(b, n)));
    return out;
  }
  if (depth <= 0 || type->node != Node::App) return out;
  std::vector<std::pair<Head, TermP>> heads;
  for (auto& e : ctx.entries)
    if (target_family(e.type) == type->head.name) heads.push_back({Head{HeadKind::Free, e.name, 0, nullptr}, e.type});
  for (auto& d : sig.decls)
    if (d.kind == DeclKind::Object && target_family(d.type) == type->head.name)
      heads.push_back({Head{HeadKind::Const, d.name, 0, nullptr}, d.type});
  for (auto& [h, ht] : heads) {
    std::function<void(const TermP&, std::vector<TermP>&)> spine = [&](const TermP& t, std::vector<TermP>& args) {
      if (t->node != Node::Pi) {
        if (struct_eq(t, type)) out.push_back(mk_app(h, args));
        return;
      }
      for (auto& a : enumerate_objects(sig, ctx, t->dom, depth - 1)) {
        args.push_back(a);
        spine(naive_instantiate(t->body, a), args);
        args.pop_back();
      }
    };
    std::vector<TermP> args;
    spine(ht, args);
  }
  return out;
}

std::vector<SubstMap> enumerate_instances(const Signature& sig, const Context& ctx, int depth) {
  std::vector<SubstMap> acc{SubstMap{}};
  for (auto& e : ctx.entries) {
    std::vector<SubstMap> next;
    for (auto& s : acc)
      for (auto& v : enumerate_objects(sig, {}, hsubst(e.type, s), depth)) {
        SubstMap t = s;
        t[e.name] = v;
        next.push_back(std::move(t));
      }
    acc = std::move(next);
  }
  return acc;
}

bool naive_match(const TermP& pattern, const TermP& target, const std::set<std::string>& pattern_vars, SubstMap& out) {
  std::set<std::string> bound;
  return nmatch(pattern, target, pattern_vars, bound, out);
}

bool naive_match_all(const std::vector<TermP>& patterns, const std::vector<TermP>& targets,
                     const std::set<std::string>& pattern_vars, SubstMap& out) {
  if (patterns.size() != targets.size()) return false;
  for (size_t i = 0; i < patterns.size(); ++i)
    if (!naive_match(patterns[i], targets[i], pattern_vars, out)) return false;
  return true;
}

std::optional<Evaluation> reference_eval(const TermP& e, int fuel) {
  if (fuel <= 0 || e->node != Node::App || e->head.kind != HeadKind::Const) return std::nullopt;
  if (e->head.name == "abs") return Evaluation{e, mk_const("ev-abs", {e->args[0]})};
  if (e->head.name != "app") return std::nullopt;
  TermP m = e->args[0], n = e->args[1];
  auto f = reference_eval(m, fuel - 1);
  if (!f || f->value->head.name != "abs") return std::nullopt;
  TermP body = f->value->args[0];  // [x] M' x
  TermP redex = naive_instantiate(body->body, n);
  auto r = reference_eval(redex, fuel - 1);
  if (!r) return std::nullopt;
  // ev-app M N V M' (eval (M' N) V) (eval M (abs M'))
  TermP d = mk_const("ev-app", {m, n, r->value, body, r->derivation, f->derivation});
  return Evaluation{r->value, d};
}

void walk_trace(const TraceP& t, const std::function<void(const TraceNode&)>& f) {
  f(*t);
  for (auto& c : t->children) walk_trace(c.node, f);
}

int term_depth(const TermP& t) {
  switch (t->node) {
    case Node::Type:
      return 0;
    case Node::Pi:
      return std::max(term_depth(t->dom), term_depth(t->body));
    case Node::Lam:
      return term_depth(t->body);
    case Node::App: {
      int d = 0;
      for (auto& a : t->args) d = std::max(d, term_depth(a));
      return d + 1;
    }
  }
  return 0;
}

TermP random_simple_type(const Signature& sig, int depth, std::mt19937& rng) {
  (void)sig;
  if (depth <= 0 || std::uniform_int_distribution<int>(0, 2)(rng) == 0) return mk_const("b");
  return mk_const("arr", {random_simple_type(sig, depth - 1, rng), random_simple_type(sig, depth - 1, rng)});
}

namespace {

TermP gen_tm(const Signature& sig, std::vector<std::pair<std::string, TermP>>& env, const TermP& ty, int depth,
             std::mt19937& rng) {
  std::vector<std::string> vars;
  for (auto& [n, t] : env)
    if (struct_eq(t, ty)) vars.push_back(n);
  int choice = std::uniform_int_distribution<int>(0, 2)(rng);
  if (!vars.empty() && (depth <= 0 || choice == 0)) return mk_free(pick(vars, rng));
  if (depth <= 0) return nullptr;
  bool is_arrow = ty->head.name == "arr";
  if (is_arrow && choice != 2) {
    std::string x = "x" + std::to_string(env.size());
    env.push_back({x, ty->args[0]});
    TermP body = gen_tm(sig, env, ty->args[1], depth - 1, rng);
    env.pop_back();
    if (!body) return nullptr;
    return mk_const("abs", {mk_lam(x, mk_const("tm"), close(body, x))});
  }
  TermP arg_ty = random_simple_type(sig, 1, rng);
  TermP f = gen_tm(sig, env, mk_const("arr", {arg_ty, ty}), depth - 1, rng);
  TermP a = f ? gen_tm(sig, env, arg_ty, depth - 1, rng) : nullptr;
  if (!f || !a) return nullptr;
  return mk_const("app", {f, a});
}

}  // namespace

TermP random_typed_tm(const Signature& sig, const TermP& ty, int depth, std::mt19937& rng) {
  std::vector<std::pair<std::string, TermP>> env;
  for (int attempt = 0; attempt < 100; ++attempt)
    if (TermP t = gen_tm(sig, env, ty, depth, rng)) return t;
  return nullptr;
}

}  // namespace lfm2::test
