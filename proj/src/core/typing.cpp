#include "lfm2/lf.h"

namespace lfm2 {

namespace {

std::string sub(const std::string& path, const std::string& step) { return path.empty() ? step : path + "/" + step; }

Context extend(const Context& ctx, const std::string& name, const TermP& type) {
  Context c = ctx;
  c.push(name, type);
  return c;
}

bool is_atomic_family(const TermP& a) { return a->node == Node::App && a->head.kind == HeadKind::Const; }

void check_obj(const Context& ctx, const Signature& sig, const TermP& m, const TermP& a, const std::string& path);
void check_fam(const Context& ctx, const Signature& sig, const TermP& a, const TermP& k, const std::string& path);

TermP check_spine(const Context& ctx, const Signature& sig, TermP type, const std::vector<TermP>& args,
                  const std::string& path) {
  for (size_t i = 0; i < args.size(); ++i) {
    if (type->node != Node::Pi)
      throw LfError("spine", "too many arguments, head type is " + show(type), sub(path, "arg" + std::to_string(i + 1)));
    check_obj(ctx, sig, args[i], type->dom, sub(path, "arg" + std::to_string(i + 1)));
    type = instantiate(type->body, args[i]);
  }
  return type;
}

TermP head_type(const Context& ctx, const Signature& sig, const Head& h, bool want_family, const std::string& path) {
  switch (h.kind) {
    case HeadKind::Const: {
      const Decl* d = sig.find(h.name);
      if (!d) throw LfError("const", "undeclared constant " + h.name, path);
      if (want_family != (d->kind == DeclKind::Family))
        throw LfError("const", std::string(want_family ? "object constant " : "family constant ") + h.name +
                                   " used at the wrong level",
                      path);
      return d->type;
    }
    case HeadKind::Free: {
      if (want_family) throw LfError("var", "variable " + h.name + " used as a type family", path);
      const TermP* t = ctx.lookup(h.name);
      if (!t) throw LfError("var", "unbound variable " + h.name, path);
      return *t;
    }
    case HeadKind::Bound:
      throw LfError("var", "dangling bound variable index " + std::to_string(h.index), path);
    case HeadKind::Redex:
      throw LfError("canonical", "beta-redex in canonical position", path);
  }
  return nullptr;
}

void check_obj(const Context& ctx, const Signature& sig, const TermP& m, const TermP& a, const std::string& path) {
  switch (m->node) {
    case Node::Lam: {
      if (a->node != Node::Pi) throw LfError("lam", "lambda checked against non-Pi type " + show(a), path);
      if (m->dom && !alpha_eq(m->dom, a->dom))
        throw LfError("lam", "annotation " + show(m->dom) + " differs from " + show(a->dom), path);
      std::string u = temp_name();
      check_obj(extend(ctx, u, a->dom), sig, open(m->body, u), open(a->body, u), sub(path, "body"));
      return;
    }
    case Node::App: {
      TermP ht = head_type(ctx, sig, m->head, false, path);
      TermP result = check_spine(ctx, sig, ht, m->args, path);
      if (!is_atomic_family(result))
        throw LfError("eta", "object " + show(m) + " is not eta-long (remaining type " + show(result) + ")", path);
      if (!alpha_eq(result, a))
        throw LfError("conv", "object " + show(m) + " has type " + show(result) + " but expected " + show(a), path);
      return;
    }
    default:
      throw LfError("object", "expected an object, found " + show(m), path);
  }
}

void check_fam(const Context& ctx, const Signature& sig, const TermP& a, const TermP& k, const std::string& path) {
  switch (a->node) {
    case Node::Pi: {
      if (k->node != Node::Type) throw LfError("pi", "Pi family checked against kind " + show(k), path);
      check_fam(ctx, sig, a->dom, mk_type(), sub(path, "dom"));
      std::string u = temp_name();
      check_fam(extend(ctx, u, a->dom), sig, open(a->body, u), mk_type(), sub(path, "body"));
      return;
    }
    case Node::Lam: {
      if (k->node != Node::Pi) throw LfError("family-lam", "family lambda against non-Pi kind " + show(k), path);
      if (!a->dom) throw LfError("family-lam", "unannotated family lambda", path);
      check_fam(ctx, sig, a->dom, mk_type(), sub(path, "dom"));
      if (!alpha_eq(a->dom, k->dom))
        throw LfError("family-lam", "annotation " + show(a->dom) + " differs from " + show(k->dom), path);
      std::string u = temp_name();
      check_fam(extend(ctx, u, a->dom), sig, open(a->body, u), open(k->body, u), sub(path, "body"));
      return;
    }
    case Node::App: {
      TermP kt = head_type(ctx, sig, a->head, true, path);
      TermP result = check_spine(ctx, sig, kt, a->args, path);
      if (result->node != Node::Type)
        throw LfError("eta", "family " + show(a) + " is not eta-long (remaining kind " + show(result) + ")", path);
      if (k->node != Node::Type) throw LfError("conv", "family " + show(a) + " has kind type, expected " + show(k), path);
      return;
    }
    default:
      throw LfError("family", "expected a type family, found " + show(a), path);
  }
}

void check_knd(const Context& ctx, const Signature& sig, const TermP& k, const std::string& path) {
  switch (k->node) {
    case Node::Type:
      return;
    case Node::Pi: {
      check_fam(ctx, sig, k->dom, mk_type(), sub(path, "dom"));
      std::string u = temp_name();
      check_knd(extend(ctx, u, k->dom), sig, open(k->body, u), sub(path, "body"));
      return;
    }
    default:
      throw LfError("kind", "expected a kind, found " + show(k), path);
  }
}

}  // namespace

void check_kind(const Context& ctx, const Signature& sig, const TermP& k) { check_knd(ctx, sig, k, ""); }
void check_family(const Context& ctx, const Signature& sig, const TermP& a, const TermP& k) {
  check_fam(ctx, sig, a, k, "");
}
void check_object(const Context& ctx, const Signature& sig, const TermP& m, const TermP& a) {
  check_obj(ctx, sig, m, a, "");
}

void check_context(const Signature& sig, const Context& ctx) {
  Context prefix;
  std::set<std::string> seen;
  for (auto& e : ctx.entries) {
    if (!seen.insert(e.name).second) throw LfError("context", "variable " + e.name + " declared twice");
    check_fam(prefix, sig, e.type, mk_type(), e.name);
    prefix.push(e.name, e.type);
  }
}

void check_signature(const Signature& sig) {
  Signature prefix;
  for (auto& d : sig.decls) {
    if (d.kind == DeclKind::Family)
      check_knd(Context{}, prefix, d.type, d.name);
    else
      check_fam(Context{}, prefix, d.type, mk_type(), d.name);
    prefix.add(d);
  }
}

TermP eta_expand(const TermP& app, const TermP& type) {
  if (type->node != Node::Pi) return app;
  std::string u = temp_name();
  TermP arg = eta_var(u, type->dom);
  std::vector<TermP> spine = app->args;
  spine.push_back(arg);
  TermP body = eta_expand(mk_app(app->head, std::move(spine)), open(type->body, u));
  return mk_lam(type->hint.empty() ? "x" : type->hint, type->dom, close(body, u));
}

TermP eta_var(const std::string& name, const TermP& type) { return eta_expand(mk_free(name), type); }

TermP type_of(const Context& ctx, const Signature& sig, const TermP& m) {
  if (m->node == Node::Lam) {
    if (!m->dom) throw LfError("lam", "cannot infer the type of an unannotated lambda");
    std::string u = temp_name();
    TermP body = type_of(extend(ctx, u, m->dom), sig, open(m->body, u));
    return mk_pi(m->hint, m->dom, close(body, u));
  }
  if (m->node != Node::App) throw LfError("object", "expected an object, found " + show(m));
  TermP ht = head_type(ctx, sig, m->head, false, "");
  return check_spine(ctx, sig, ht, m->args, "");
}

// ---------------------------------------------------------------------------
// Normalization: bidirectional elaboration of well-typed terms to canonical form.

namespace {

enum class Level { Kind, Family, Object };

Level level_of(const Signature& sig, const TermP& t) {
  switch (t->node) {
    case Node::Type:
      return Level::Kind;
    case Node::Pi:
      return level_of(sig, t->body) == Level::Kind ? Level::Kind : Level::Family;
    case Node::Lam:
      return level_of(sig, t->body);
    case Node::App:
      if (t->head.kind == HeadKind::Const) {
        const Decl* d = sig.find(t->head.name);
        if (!d) throw LfError("IllTyped", "undeclared constant " + t->head.name);
        return d->kind == DeclKind::Family ? Level::Family : Level::Object;
      }
      if (t->head.kind == HeadKind::Redex) return level_of(sig, t->head.term);
      return Level::Object;
  }
  return Level::Object;
}

struct Norm {
  const Signature& sig;

  [[noreturn]] void fail(const std::string& msg) { throw LfError("IllTyped", msg); }

  TermP head_ty(const Context& ctx, const Head& h, bool family) {
    try {
      return head_type(ctx, sig, h, family, "");
    } catch (const LfError& e) {
      fail(e.what());
    }
  }

  // Returns (canonical, type).
  std::pair<TermP, TermP> synth_obj(const Context& ctx, const TermP& t) {
    switch (t->node) {
      case Node::Lam: {
        if (!t->dom) fail("cannot infer the domain of an unannotated lambda");
        TermP b = check_fam(ctx, t->dom, mk_type());
        std::string u = temp_name();
        auto [body, ty] = synth_obj(extend(ctx, u, b), open(t->body, u));
        return {mk_lam(t->hint, b, close(body, u)), mk_pi(t->hint, b, close(ty, u))};
      }
      case Node::App: {
        if (t->head.kind == HeadKind::Redex) {
          auto [f, ft] = synth_obj(ctx, t->head.term);
          for (auto& a : t->args) {
            if (ft->node != Node::Pi) fail("too many arguments for " + show(f));
            TermP n = check_obj(ctx, a, ft->dom);
            f = happly(f, {n});
            ft = instantiate(ft->body, n);
          }
          return {f, ft};
        }
        if (t->head.kind == HeadKind::Bound) fail("dangling bound variable");
        TermP ty = head_ty(ctx, t->head, false);
        std::vector<TermP> spine;
        for (auto& a : t->args) {
          if (ty->node != Node::Pi) fail("too many arguments for " + show(t));
          TermP n = check_obj(ctx, a, ty->dom);
          spine.push_back(n);
          ty = instantiate(ty->body, n);
        }
        return {eta_expand(mk_app(t->head, std::move(spine)), ty), ty};
      }
      default:
        fail("expected an object, found " + show(t));
    }
  }

  TermP check_obj(const Context& ctx, const TermP& t, const TermP& a) {
    if (t->node == Node::Lam) {
      if (a->node != Node::Pi) fail("lambda checked against non-Pi type " + show(a));
      if (t->dom) {
        TermP b = check_fam(ctx, t->dom, mk_type());
        if (!alpha_eq(b, a->dom)) fail("lambda annotation " + show(b) + " differs from " + show(a->dom));
      }
      std::string u = temp_name();
      TermP body = check_obj(extend(ctx, u, a->dom), open(t->body, u), open(a->body, u));
      return mk_lam(t->hint, a->dom, close(body, u));
    }
    auto [m, ty] = synth_obj(ctx, t);
    if (!alpha_eq(ty, a)) fail("object " + show(m) + " has type " + show(ty) + " but expected " + show(a));
    return m;
  }

  std::pair<TermP, TermP> synth_fam(const Context& ctx, const TermP& t) {
    switch (t->node) {
      case Node::Pi: {
        TermP d = check_fam(ctx, t->dom, mk_type());
        std::string u = temp_name();
        TermP b = check_fam(extend(ctx, u, d), open(t->body, u), mk_type());
        return {mk_pi(t->hint, d, close(b, u)), mk_type()};
      }
      case Node::Lam: {
        if (!t->dom) fail("cannot infer the domain of an unannotated family lambda");
        TermP d = check_fam(ctx, t->dom, mk_type());
        std::string u = temp_name();
        auto [b, k] = synth_fam(extend(ctx, u, d), open(t->body, u));
        return {mk_lam(t->hint, d, close(b, u)), mk_pi(t->hint, d, close(k, u))};
      }
      case Node::App: {
        if (t->head.kind == HeadKind::Redex) {
          auto [f, fk] = synth_fam(ctx, t->head.term);
          for (auto& a : t->args) {
            if (fk->node != Node::Pi) fail("too many arguments for family " + show(f));
            TermP n = check_obj(ctx, a, fk->dom);
            f = happly(f, {n});
            fk = instantiate(fk->body, n);
          }
          return {f, fk};
        }
        TermP k = head_ty(ctx, t->head, true);
        std::vector<TermP> spine;
        for (auto& a : t->args) {
          if (k->node != Node::Pi) fail("too many arguments for family " + show(t));
          TermP n = check_obj(ctx, a, k->dom);
          spine.push_back(n);
          k = instantiate(k->body, n);
        }
        return {eta_expand(mk_app(t->head, std::move(spine)), k), k};
      }
      default:
        fail("expected a type family, found " + show(t));
    }
  }

  TermP check_fam(const Context& ctx, const TermP& t, const TermP& k) {
    auto [a, got] = synth_fam(ctx, t);
    if (!alpha_eq(got, k)) fail("family " + show(a) + " has kind " + show(got) + " but expected " + show(k));
    return a;
  }

  TermP kind(const Context& ctx, const TermP& t) {
    if (t->node == Node::Type) return t;
    if (t->node != Node::Pi) fail("expected a kind, found " + show(t));
    TermP d = check_fam(ctx, t->dom, mk_type());
    std::string u = temp_name();
    TermP b = kind(extend(ctx, u, d), open(t->body, u));
    return mk_pi(t->hint, d, close(b, u));
  }
};

}  // namespace

TermP normalize(const TermP& t, const Context& ctx, const Signature& sig) {
  Norm n{sig};
  switch (level_of(sig, t)) {
    case Level::Kind:
      return n.kind(ctx, t);
    case Level::Family:
      return n.synth_fam(ctx, t).first;
    case Level::Object:
      return n.synth_obj(ctx, t).first;
  }
  return t;
}

TermP normalize_at(const TermP& t, const TermP& type, const Context& ctx, const Signature& sig) {
  Norm n{sig};
  return n.check_obj(ctx, t, type);
}

bool equal(const TermP& t1, const TermP& t2, const Context& ctx, const Signature& sig) {
  try {
    return alpha_eq(normalize(t1, ctx, sig), normalize(t2, ctx, sig));
  } catch (const LfError&) {
    return alpha_eq(t1, t2);
  }
}

}  // namespace lfm2
