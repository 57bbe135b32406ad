#include "lfm2/elab.h"

#include <cctype>
#include <functional>
#include <sstream>

#include "lfm2/unify.h"

namespace lfm2 {

namespace {

struct Local {
  std::string surface;
  std::string internal;
  TermP type;
};
using Locals = std::vector<Local>;

[[noreturn]] void fail_at(const SExprP& s, const std::string& kind, const std::string& msg) {
  throw SyntaxError(kind, msg, s ? s->line : 0, s ? s->col : 0);
}

bool implicit_name(const std::string& n) {
  return !n.empty() && (std::isupper(static_cast<unsigned char>(n[0])) != 0);
}

void flatten(const SExprP& s, SExprP& head, std::vector<SExprP>& args) {
  if (s->k == SExpr::K::App) {
    flatten(s->a, head, args);
    args.insert(args.end(), s->args.begin(), s->args.end());
    return;
  }
  head = s;
}

// Reconstruction state for one declaration: named implicit variables and
// generated metavariables, both solved by pattern unification.
class Elab {
 public:
  explicit Elab(const Signature& sig) : sig_(sig) {}

  TermP kind(Locals& L, const SExprP& s) {
    switch (s->k) {
      case SExpr::K::Type:
        return mk_type();
      case SExpr::K::Arrow: {
        if (s->backward) {
          TermP cod = kind(L, s->b);
          return mk_arrow(family(L, s->a), cod);
        }
        TermP dom = family(L, s->a);
        return mk_arrow(dom, kind(L, s->b));
      }
      case SExpr::K::Pi: {
        if (!s->a) fail_at(s, "ReconstructionAmbiguous", "binder '" + s->name + "' needs a type");
        TermP dom = family(L, s->a);
        std::string u = temp_name();
        L.push_back({s->name, u, dom});
        TermP body = kind(L, s->b);
        L.pop_back();
        return mk_pi(s->name, dom, close(body, u));
      }
      default:
        fail_at(s, "IllTyped", "expected a kind");
    }
  }

  TermP family(Locals& L, const SExprP& s) {
    switch (s->k) {
      case SExpr::K::Arrow: {
        // Sides are reconstructed in textual order.
        if (s->backward) {
          TermP cod = family(L, s->b);
          return mk_arrow(family(L, s->a), cod);
        }
        TermP dom = family(L, s->a);
        return mk_arrow(dom, family(L, s->b));
      }
      case SExpr::K::Pi: {
        if (!s->a) fail_at(s, "ReconstructionAmbiguous", "binder '" + s->name + "' needs a type");
        TermP dom = family(L, s->a);
        std::string u = temp_name();
        L.push_back({s->name, u, dom});
        TermP body = family(L, s->b);
        L.pop_back();
        return mk_pi(s->name, dom, close(body, u));
      }
      case SExpr::K::Ident:
      case SExpr::K::App: {
        SExprP head;
        std::vector<SExprP> args;
        flatten(s, head, args);
        if (head->k != SExpr::K::Ident) fail_at(head, "IllTyped", "expected a type family");
        for (auto& l : L)
          if (l.surface == head->name) fail_at(head, "IllTyped", "'" + head->name + "' is a variable, not a type family");
        const Decl* d = sig_.find(head->name);
        if (!d) fail_at(head, "UndeclaredIdentifier", "type family '" + head->name + "' is not declared");
        if (d->kind != DeclKind::Family) fail_at(head, "IllTyped", "'" + head->name + "' is an object constant, not a type family");
        std::vector<TermP> vals;
        TermP k = instantiate_implicits(L, d->type, d->implicit_count, vals);
        for (auto& a : args) {
          k = hsubst(k, sigma_);
          if (k->node != Node::Pi) fail_at(a, "IllTyped", "too many arguments to '" + head->name + "'");
          TermP v = object(L, a, k->dom);
          vals.push_back(v);
          k = instantiate(k->body, v);
        }
        if (k->node != Node::Type) fail_at(s, "IllTyped", "type family '" + head->name + "' is not fully applied");
        return mk_const(head->name, std::move(vals));
      }
      case SExpr::K::Type:
        fail_at(s, "IllTyped", "'type' used where a type family is expected");
      default:
        fail_at(s, "IllTyped", "expected a type family");
    }
  }

  TermP object(Locals& L, const SExprP& s, TermP A) {
    A = hsubst(A, sigma_);
    switch (s->k) {
      case SExpr::K::Lam: {
        if (A->node != Node::Pi) fail_at(s, "IllTyped", "lambda checked against non-function type " + show(A));
        if (s->a) unify_eq(family(L, s->a), A->dom, L, s);
        TermP dom = hsubst(A->dom, sigma_);
        std::string u = temp_name();
        L.push_back({s->name, u, dom});
        TermP body = object(L, s->b, open(A->body, u));
        L.pop_back();
        return mk_lam(s->name, dom, close(body, u));
      }
      case SExpr::K::Hole:
        return new_meta(L, "X", A);
      case SExpr::K::Ascribe: {
        TermP t = family(L, s->b);
        unify_eq(t, A, L, s);
        return object(L, s->a, t);
      }
      case SExpr::K::Ident:
      case SExpr::K::App:
        return spine(L, s, A);
      default:
        fail_at(s, "IllTyped", "expected an object");
    }
  }

  // Final closed classifier: remaining variables become leading Pi binders.
  std::pair<TermP, int> close_over_unknowns(TermP t, const SExprP& at) {
    t = hsubst(t, sigma_);
    std::vector<Entry> order = remaining(t, at);
    std::set<std::string> used;
    collect_consts(t, used);
    for (auto& e : order)
      if (named_.count(e.name)) used.insert(e.name);
    SubstMap ren;
    std::vector<Entry> named_entries;
    for (auto& e : order) {
      std::string n = e.name;
      if (!named_.count(e.name)) {
        std::string base = hint_of(e.name);
        n = base;
        for (int k = 1; used.count(n); ++k) n = base + std::to_string(k);
        used.insert(n);
      }
      TermP ty = hsubst(e.type, ren);
      ren[e.name] = eta_var(n, ty);
      named_entries.push_back({n, ty});
    }
    t = hsubst(t, ren);
    for (size_t i = named_entries.size(); i-- > 0;)
      t = mk_pi(named_entries[i].name, named_entries[i].type, close(t, named_entries[i].name));
    return {t, static_cast<int>(named_entries.size())};
  }

  // Remaining variables of t with their types: named variables in source
  // order, then the rest by first occurrence, each preceded by the variables
  // its type mentions.
  std::vector<Entry> remaining(const TermP& t0, const SExprP& at) {
    TermP t = hsubst(t0, sigma_);
    std::vector<Entry> out;
    std::set<std::string> done;
    std::set<std::string> active;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
      if (done.count(v) || !types_.count(v) || sigma_.count(v)) return;
      if (active.count(v)) fail_at(at, "ReconstructionAmbiguous", "circular dependency through " + v);
      TermP ty = types_[v];
      if (!ty) fail_at(at, "ReconstructionAmbiguous", "cannot infer the type of " + v);
      ty = hsubst(ty, sigma_);
      active.insert(v);
      for (auto& w : free_vars(ty)) visit(w);
      active.erase(v);
      done.insert(v);
      out.push_back({v, ty});
    };
    std::vector<std::string> fv = free_vars(t);
    std::set<std::string> present(fv.begin(), fv.end());
    for (auto& v : named_order_)
      if (present.count(v)) visit(v);
    for (auto& v : fv) visit(v);
    return out;
  }

  TermP apply(const TermP& t) const { return hsubst(t, sigma_); }

  std::string hint_of(const std::string& v) const {
    auto it = hints_.find(v);
    std::string base = it != hints_.end() ? it->second : name_base(v);
    while (!base.empty() && base[0] == '?') base.erase(0, 1);
    if (base.empty() || is_temp_name(base)) base = "X";
    return base;
  }

  bool is_named(const std::string& v) const { return named_.count(v) > 0; }

 private:
  const Signature& sig_;
  NameSupply supply_;
  std::vector<std::string> named_order_;
  std::vector<std::string> meta_order_;
  std::set<std::string> named_;
  std::unordered_map<std::string, TermP> types_;
  std::unordered_map<std::string, std::string> hints_;
  SubstMap sigma_;

  static std::vector<Entry> entries(const Locals& L) {
    std::vector<Entry> out;
    for (auto& l : L) out.push_back({l.internal, l.type});
    return out;
  }

  std::vector<TermP> local_args(const Locals& L) {
    std::vector<TermP> out;
    for (auto& l : L) out.push_back(eta_var(l.internal, hsubst(l.type, sigma_)));
    return out;
  }

  TermP new_meta(const Locals& L, const std::string& hint, const TermP& A) {
    std::string m = supply_.fresh("?" + hint);
    TermP raised = A;
    for (size_t i = L.size(); i-- > 0;) raised = mk_pi(L[i].surface, hsubst(L[i].type, sigma_), close(raised, L[i].internal));
    types_[m] = hsubst(raised, sigma_);
    hints_[m] = hint;
    meta_order_.push_back(m);
    return eta_expand(mk_free(m, local_args(L)), A);
  }

  TermP instantiate_implicits(const Locals& L, TermP type, int count, std::vector<TermP>& vals) {
    for (int i = 0; i < count; ++i) {
      std::string hint = type->hint.empty() ? "X" : type->hint;
      TermP v = new_meta(L, hint, type->dom);
      vals.push_back(v);
      type = instantiate(type->body, v);
    }
    return type;
  }

  void unify_eq(const TermP& a, const TermP& b, const Locals& L, const SExprP& at) {
    UnifProblem p;
    p.decompose_same_head = true;
    for (auto* list : {&named_order_, &meta_order_})
      for (auto& v : *list)
        if (!sigma_.count(v)) {
          TermP ty = types_[v];
          p.ctx.push(v, ty ? hsubst(ty, sigma_) : nullptr);
          p.flex.push_back(v);
        }
    p.eqs.push_back({hsubst(a, sigma_), hsubst(b, sigma_), entries(L)});
    UnifOutcome out = unify(p, sig_, supply_);
    if (out.kind == UnifOutcome::Kind::NoSolution)
      fail_at(at, "IllTyped", "type mismatch: " + show(apply(a)) + " against " + show(apply(b)) + " (" + out.reason + ")");
    if (out.kind == UnifOutcome::Kind::OutsideFragment)
      fail_at(at, "ReconstructionAmbiguous", "cannot reconstruct implicit arguments: " + out.reason);
    SubstMap s = out.subst.map();
    for (auto& [k, v] : sigma_) v = hsubst(v, s);
    for (auto& [k, v] : s) sigma_[k] = v;
    for (auto& e : out.result.entries) {
      if (!types_.count(e.name)) {
        meta_order_.push_back(e.name);
        hints_[e.name] = hint_of(e.name);
      }
      types_[e.name] = e.type;
    }
  }

  TermP spine(Locals& L, const SExprP& s, const TermP& A) {
    SExprP head;
    std::vector<SExprP> args;
    flatten(s, head, args);
    if (head->k != SExpr::K::Ident) fail_at(head, "ReconstructionAmbiguous", "unsupported head term");
    Head h;
    TermP type;
    std::vector<TermP> vals;
    const Local* local = nullptr;
    for (size_t i = L.size(); i-- > 0;)
      if (L[i].surface == head->name) {
        local = &L[i];
        break;
      }
    if (local) {
      h.kind = HeadKind::Free;
      h.name = local->internal;
      type = local->type;
    } else if (const Decl* d = sig_.find(head->name)) {
      if (d->kind != DeclKind::Object) fail_at(head, "IllTyped", "type family '" + head->name + "' used as an object");
      h.kind = HeadKind::Const;
      h.name = head->name;
      type = instantiate_implicits(L, d->type, d->implicit_count, vals);
    } else if (implicit_name(head->name)) {
      const std::string& n = head->name;
      h.kind = HeadKind::Free;
      h.name = n;
      if (!types_.count(n)) {
        named_.insert(n);
        named_order_.push_back(n);
        types_[n] = nullptr;
      }
      if (!types_[n]) types_[n] = infer_named_type(L, head, args, A);
      type = types_[n];
    } else {
      fail_at(head, "UndeclaredIdentifier", "'" + head->name + "' is not declared");
    }
    for (auto& a : args) {
      type = hsubst(type, sigma_);
      if (type->node != Node::Pi) fail_at(a, "IllTyped", "too many arguments to '" + head->name + "'");
      TermP v = object(L, a, type->dom);
      vals.push_back(v);
      type = instantiate(type->body, v);
    }
    TermP app = mk_app(h, std::move(vals));
    type = hsubst(type, sigma_);
    unify_eq(type, A, L, s);
    type = hsubst(type, sigma_);
    return type->node == Node::Pi ? eta_expand(app, type) : app;
  }

  TermP infer_named_type(const Locals& L, const SExprP& head, const std::vector<SExprP>& args, const TermP& A) {
    std::vector<const Local*> params;
    for (auto& a : args) {
      const Local* found = nullptr;
      if (a->k == SExpr::K::Ident)
        for (size_t i = L.size(); i-- > 0;)
          if (L[i].surface == a->name) {
            found = &L[i];
            break;
          }
      if (!found)
        fail_at(head, "ReconstructionAmbiguous",
                "cannot infer the type of '" + head->name + "' from this occurrence; annotate it");
      for (auto* p : params)
        if (p == found) fail_at(head, "ReconstructionAmbiguous", "cannot infer the type of '" + head->name + "'");
      params.push_back(found);
    }
    TermP t = hsubst(A, sigma_);
    for (size_t i = params.size(); i-- > 0;)
      t = mk_pi(params[i]->surface, hsubst(params[i]->type, sigma_), close(t, params[i]->internal));
    for (auto& l : L)
      if (occurs_free(t, l.internal))
        fail_at(head, "ReconstructionAmbiguous", "the type of '" + head->name + "' would depend on a bound variable");
    return t;
  }
};

bool surface_is_kind(const SExprP& s) {
  const SExpr* cur = s.get();
  while (cur->k == SExpr::K::Pi || cur->k == SExpr::K::Arrow) cur = cur->b.get();
  return cur->k == SExpr::K::Type;
}

OrderSpec parse_order(TokenStream& ts) {
  OrderSpec o;
  if (ts.at(Tok::LBrace) || ts.at(Tok::LBracket)) {
    bool lex = ts.at(Tok::LBrace);
    ts.next();
    o.kind = lex ? OrderSpec::Kind::Lex : OrderSpec::Kind::Simul;
    while (!ts.at(lex ? Tok::RBrace : Tok::RBracket)) {
      if (ts.at(Tok::End)) ts.fail("unterminated termination order");
      o.parts.push_back(parse_order(ts));
    }
    ts.next();
    if (o.parts.empty()) ts.fail("empty termination order");
    return o;
  }
  o.kind = OrderSpec::Kind::Arg;
  o.label = ts.expect_ident("a termination argument");
  return o;
}

void skip_directive(TokenStream& ts) {
  int depth = 0;
  while (!ts.at(Tok::End)) {
    Token t = ts.next();
    if (t.kind == Tok::LParen || t.kind == Tok::LBracket || t.kind == Tok::LBrace) ++depth;
    if (t.kind == Tok::RParen || t.kind == Tok::RBracket || t.kind == Tok::RBrace) --depth;
    if (t.kind == Tok::Dot && depth <= 0) return;
  }
  ts.fail("expected '.'");
}

}  // namespace

SourceFile parse_source(const std::string& text) {
  SourceFile src;
  TokenStream ts(tokenize(text));
  while (!ts.at(Tok::End)) {
    if (ts.at(Tok::Directive)) {
      Token d = ts.next();
      if (d.text == "%mode") {
        ModeSpec m;
        m.line = d.line;
        bool paren = ts.at(Tok::LParen);
        if (paren) ts.next();
        m.family = ts.expect_ident("a type family");
        while (ts.at(Tok::Ident)) {
          Token t = ts.next();
          if (t.text.size() < 2 || (t.text[0] != '+' && t.text[0] != '-'))
            throw SyntaxError("ParseError", "mode labels must start with '+' or '-'", t.line, t.col);
          m.params.push_back({t.text[0] == '+', t.text.substr(1)});
        }
        if (paren) ts.expect(Tok::RParen, "')'");
        ts.expect(Tok::Dot, "'.'");
        if (!src.sig.find(m.family)) throw SyntaxError("UndeclaredIdentifier", "'" + m.family + "' is not declared", d.line, d.col);
        src.modes.push_back(std::move(m));
      } else if (d.text == "%total") {
        TotalSpec t;
        t.line = d.line;
        t.order = parse_order(ts);
        ts.expect(Tok::LParen, "'('");
        t.family = ts.expect_ident("a type family");
        while (ts.at(Tok::Ident)) t.call_args.push_back(ts.next().text);
        ts.expect(Tok::RParen, "')'");
        ts.expect(Tok::Dot, "'.'");
        if (!src.sig.find(t.family)) throw SyntaxError("UndeclaredIdentifier", "'" + t.family + "' is not declared", d.line, d.col);
        src.totals.push_back(std::move(t));
      } else {
        skip_directive(ts);
      }
      continue;
    }
    Token nameTok = ts.peek();
    std::string name = ts.expect_ident("a declaration");
    if (src.sig.find(name)) throw SyntaxError("ParseError", "duplicate declaration of '" + name + "'", nameTok.line, nameTok.col);
    ts.expect(Tok::Colon, "':'");
    SExprP body = ts.term();
    ts.expect(Tok::Dot, "'.'");
    Elab el(src.sig);
    Locals L;
    bool is_kind = surface_is_kind(body);
    TermP t = is_kind ? el.kind(L, body) : el.family(L, body);
    auto [closed, count] = el.close_over_unknowns(t, body);
    try {
      if (is_kind)
        check_kind({}, src.sig, closed);
      else
        check_family({}, src.sig, closed, mk_type());
    } catch (const LfError& e) {
      throw SyntaxError("IllTyped", "declaration '" + name + "' does not check: " + e.what(), nameTok.line, nameTok.col);
    }
    src.sig.add({name, closed, is_kind ? DeclKind::Family : DeclKind::Object, count});
  }
  return src;
}

ElaboratedGoal elaborate_goal(const std::string& text, const Signature& sig) {
  TokenStream ts(tokenize(text));
  ElaboratedGoal g;
  if (ts.at(Tok::Ident) && ts.peek(1).kind == Tok::Colon) {
    g.proof_name = ts.next().text;
    ts.next();
  }
  SExprP body = ts.term();
  if (ts.at(Tok::Dot)) ts.next();
  if (!ts.at(Tok::End)) ts.fail("unexpected text after goal");
  Elab el(sig);
  Locals L;
  TermP t = el.family(L, body);
  std::vector<Entry> order = el.remaining(t, body);
  std::set<std::string> used;
  collect_consts(t, used);
  for (auto& e : order)
    if (el.is_named(e.name)) used.insert(e.name);
  SubstMap ren;
  for (auto& e : order) {
    std::string n = e.name;
    if (!el.is_named(n)) {
      std::string base = el.hint_of(n);
      n = base;
      for (int k = 1; used.count(n); ++k) n = base + std::to_string(k);
      used.insert(n);
    }
    TermP ty = hsubst(e.type, ren);
    ren[e.name] = eta_var(n, ty);
    g.vars.push(n, ty);
  }
  g.target = hsubst(el.apply(t), ren);
  try {
    check_context(sig, g.vars);
    check_family(g.vars, sig, g.target, mk_type());
  } catch (const LfError& e) {
    throw SyntaxError("IllTyped", std::string("goal does not check: ") + e.what(), 1, 1);
  }
  return g;
}

namespace {

TerminationOrder resolve_part(const OrderSpec& o, const TotalSpec& spec, const ModedFamily& mf) {
  if (o.kind == OrderSpec::Kind::Arg) {
    int implicit = 0;
    for (auto& p : mf.params) implicit += p.implicit ? 1 : 0;
    int found = -1;
    for (size_t i = 0; i < spec.call_args.size(); ++i)
      if (spec.call_args[i] == o.label) found = static_cast<int>(i);
    if (found < 0)
      throw SyntaxError("ParseError", "termination argument '" + o.label + "' does not occur in the call pattern", spec.line, 1);
    int pos = implicit + found;
    if (pos >= static_cast<int>(mf.params.size()) || !mf.params[static_cast<size_t>(pos)].input)
      throw TotalityError("TerminationError", "termination argument '" + o.label + "' is not an input");
    return TerminationOrder::arg(pos);
  }
  std::vector<TerminationOrder> parts;
  for (auto& p : o.parts) parts.push_back(resolve_part(p, spec, mf));
  return o.kind == OrderSpec::Kind::Lex ? TerminationOrder::lex(std::move(parts)) : TerminationOrder::simul(std::move(parts));
}

}  // namespace

TerminationOrder resolve_order(const TotalSpec& spec, const ModedFamily& mf) {
  int explicit_count = 0;
  for (auto& p : mf.params) explicit_count += p.implicit ? 0 : 1;
  if (static_cast<int>(spec.call_args.size()) != explicit_count)
    throw SyntaxError("ParseError", "call pattern for '" + spec.family + "' has the wrong number of arguments", spec.line, 1);
  std::set<std::string> seen;
  for (auto& a : spec.call_args)
    if (a != "_" && !seen.insert(a).second)
      throw SyntaxError("ParseError", "repeated argument '" + a + "' in call pattern", spec.line, 1);
  return resolve_part(spec.order, spec, mf);
}

std::string print_signature(const Signature& sig) {
  std::ostringstream out;
  for (auto& d : sig.decls) out << d.name << " : " << show(d.type) << ".\n";
  return out.str();
}

std::string print_mode(const ModedFamily& mf) {
  std::ostringstream out;
  out << "%mode " << mf.family;
  for (auto& p : mf.params) out << " " << (p.input ? "+" : "-") << p.name;
  out << ".";
  return out.str();
}

namespace {

void print_order_rec(std::ostringstream& out, const TerminationOrder& o, const ModedFamily& mf) {
  switch (o.kind) {
    case TerminationOrder::Kind::Subterm:
      out << mf.params.at(static_cast<size_t>(o.position)).name;
      return;
    case TerminationOrder::Kind::Lex:
    case TerminationOrder::Kind::Simul: {
      bool lex = o.kind == TerminationOrder::Kind::Lex;
      out << (lex ? "{" : "[");
      for (size_t i = 0; i < o.parts.size(); ++i) {
        if (i) out << " ";
        print_order_rec(out, o.parts[i], mf);
      }
      out << (lex ? "}" : "]");
      return;
    }
  }
}

}  // namespace

std::string print_order(const TerminationOrder& o, const ModedFamily& mf) {
  std::ostringstream out;
  print_order_rec(out, o, mf);
  return out.str();
}

}  // namespace lfm2
