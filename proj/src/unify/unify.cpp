#include "lfm2/unify.h"

#include <algorithm>
#include <deque>
#include <map>

namespace lfm2 {

namespace {

struct Fail {
  UnifOutcome::Kind kind;
  std::string reason;
};

[[noreturn]] void no_solution(const std::string& why) { throw Fail{UnifOutcome::Kind::NoSolution, why}; }
[[noreturn]] void outside(const std::string& why) { throw Fail{UnifOutcome::Kind::OutsideFragment, why}; }

TermP append_arg(const TermP& t, const TermP& arg) {
  std::vector<TermP> args = t->args;
  args.push_back(arg);
  return mk_app(t->head, std::move(args));
}

class Unifier {
 public:
  Unifier(const UnifProblem& p, NameSupply& s) : supply_(s), decompose_(p.decompose_same_head) {
    double k = 0;
    for (auto& v : p.flex) {
      key_[v] = k;
      k += 1.0;
      const TermP* t = p.ctx.lookup(v);
      types_[v] = t ? *t : nullptr;
      order_.push_back(v);
    }
    for (auto& e : p.eqs) work_.push_back(e);
  }

  UnifOutcome run(const std::vector<std::string>& flex) {
    UnifOutcome out;
    try {
      while (!work_.empty()) {
        Equation e = work_.front();
        work_.pop_front();
        step(hsubst(e.lhs, sigma_), hsubst(e.rhs, sigma_), e.locals);
      }
    } catch (const Fail& f) {
      out.kind = f.kind;
      out.reason = f.reason;
      return out;
    }
    out.kind = UnifOutcome::Kind::Mgu;
    for (auto& v : flex) {
      auto it = sigma_.find(v);
      if (it != sigma_.end()) out.subst.binds.push_back({v, it->second});
    }
    // Remaining variables ordered by key, then stably sorted so that every
    // variable follows the variables its classifier mentions.
    std::vector<std::string> rest;
    for (auto& v : order_)
      if (!sigma_.count(v)) rest.push_back(v);
    std::stable_sort(rest.begin(), rest.end(), [&](auto& a, auto& b) { return key_[a] < key_[b]; });
    std::vector<Entry> pending;
    for (auto& v : rest) pending.push_back({v, types_[v] ? hsubst(types_[v], sigma_) : nullptr});
    std::set<std::string> placed;
    std::set<std::string> all(rest.begin(), rest.end());
    while (!pending.empty()) {
      bool progress = false;
      for (size_t i = 0; i < pending.size(); ++i) {
        bool ready = true;
        if (pending[i].type)
          for (auto& fv : free_vars(pending[i].type))
            if (all.count(fv) && !placed.count(fv) && fv != pending[i].name) ready = false;
        if (ready) {
          placed.insert(pending[i].name);
          out.result.push(pending[i].name, pending[i].type);
          pending.erase(pending.begin() + static_cast<long>(i));
          progress = true;
          break;
        }
      }
      if (!progress) {
        for (auto& e : pending) out.result.push(e.name, e.type);
        break;
      }
    }
    return out;
  }

 private:
  NameSupply& supply_;
  bool decompose_;
  std::map<std::string, double> key_;
  std::unordered_map<std::string, TermP> types_;
  std::vector<std::string> order_;
  SubstMap sigma_;
  std::deque<Equation> work_;

  bool is_flex(const std::string& v) const { return key_.count(v) && !sigma_.count(v); }

  bool flex_head(const TermP& t) const { return t->node == Node::App && t->head.kind == HeadKind::Free && is_flex(t->head.name); }

  static bool is_local(const std::vector<Entry>& locals, const std::string& v) {
    for (auto& e : locals)
      if (e.name == v) return true;
    return false;
  }

  // Arguments as distinct local parameters, if the application is a pattern.
  static std::optional<std::vector<std::string>> pattern_args(const TermP& t, const std::vector<Entry>& locals) {
    std::vector<std::string> out;
    for (auto& a : t->args) {
      auto v = as_eta_var(a);
      if (!v || !is_local(locals, *v)) return std::nullopt;
      if (std::find(out.begin(), out.end(), *v) != out.end()) return std::nullopt;
      out.push_back(*v);
    }
    return out;
  }

  TermP type_of_flex(const std::string& v) {
    TermP t = types_[v];
    return t ? hsubst(t, sigma_) : nullptr;
  }

  void bind(const std::string& v, const TermP& value) {
    SubstMap one{{v, value}};
    for (auto& [name, term] : sigma_) term = hsubst(term, one);
    sigma_[v] = value;
  }

  void push_front(std::vector<Equation> eqs) {
    for (auto it = eqs.rbegin(); it != eqs.rend(); ++it) work_.push_front(*it);
  }

  void step(const TermP& s, const TermP& t, const std::vector<Entry>& locals) {
    if (alpha_eq(s, t)) return;
    if (s->node == Node::Lam || t->node == Node::Lam) {
      TermP dom = s->node == Node::Lam && s->dom ? s->dom : (t->node == Node::Lam ? t->dom : nullptr);
      if (!dom) outside("lambda without a domain");
      std::string u = temp_name();
      std::vector<Entry> inner = locals;
      inner.push_back({u, dom});
      TermP arg = eta_var(u, dom);
      TermP s2 = s->node == Node::Lam ? open(s->body, u) : (s->node == Node::App ? append_arg(s, arg) : nullptr);
      TermP t2 = t->node == Node::Lam ? open(t->body, u) : (t->node == Node::App ? append_arg(t, arg) : nullptr);
      if (!s2 || !t2) no_solution("lambda against " + show(s->node == Node::Lam ? t : s));
      push_front({{s2, t2, inner}});
      return;
    }
    if (s->node != t->node) no_solution("shape clash between " + show(s) + " and " + show(t));
    switch (s->node) {
      case Node::Type:
        return;
      case Node::Pi: {
        std::string u = temp_name();
        std::vector<Entry> inner = locals;
        inner.push_back({u, s->dom});
        push_front({{s->dom, t->dom, locals}, {open(s->body, u), open(t->body, u), inner}});
        return;
      }
      case Node::App:
        break;
      case Node::Lam:
        return;
    }
    bool fs = flex_head(s);
    bool ft = flex_head(t);
    if (!fs && !ft) {
      const Head& a = s->head;
      const Head& b = t->head;
      bool same = a.kind == b.kind && a.name == b.name && a.index == b.index && a.kind != HeadKind::Redex;
      if (!same) no_solution("head clash between " + show(s) + " and " + show(t));
      if (s->args.size() != t->args.size()) no_solution("spine length mismatch");
      std::vector<Equation> eqs;
      for (size_t i = 0; i < s->args.size(); ++i) eqs.push_back({s->args[i], t->args[i], locals});
      push_front(std::move(eqs));
      return;
    }
    if (fs && !ft) return flex_rigid(s, t, locals);
    if (!fs && ft) return flex_rigid(t, s, locals);
    flex_flex(s, t, locals);
  }

  bool occurs_rigid(const TermP& t, const std::string& v) {
    switch (t->node) {
      case Node::Type:
        return false;
      case Node::Pi:
      case Node::Lam:
        return (t->dom && occurs_rigid(t->dom, v)) || occurs_rigid(t->body, v);
      case Node::App:
        if (t->head.kind == HeadKind::Free && t->head.name == v) return true;
        if (t->head.kind == HeadKind::Free && is_flex(t->head.name)) return false;
        for (auto& a : t->args)
          if (occurs_rigid(a, v)) return true;
        return false;
    }
    return false;
  }

  // Replace flexible variable g by a new variable over the kept argument positions.
  void restrict_args(const std::string& g, const std::vector<bool>& keep) {
    TermP ty = type_of_flex(g);
    if (!ty) outside("cannot prune " + g + " with unknown type");
    std::vector<std::string> ws;
    std::vector<TermP> doms;
    std::vector<std::string> hints;
    TermP cur = ty;
    for (size_t i = 0; i < keep.size(); ++i) {
      if (cur->node != Node::Pi) outside("arity mismatch while pruning " + g);
      std::string w = temp_name();
      ws.push_back(w);
      doms.push_back(cur->dom);
      hints.push_back(cur->hint.empty() ? "x" : cur->hint);
      cur = open(cur->body, w);
    }
    std::set<std::string> dropped;
    for (size_t i = 0; i < keep.size(); ++i)
      if (!keep[i]) dropped.insert(ws[i]);
    auto mentions_dropped = [&](const TermP& t) {
      for (auto& fv : free_vars(t))
        if (dropped.count(fv)) return true;
      return false;
    };
    if (mentions_dropped(cur)) outside("type of " + g + " depends on a pruned argument");
    for (size_t i = 0; i < keep.size(); ++i)
      if (keep[i] && mentions_dropped(doms[i])) outside("type of " + g + " depends on a pruned argument");
    TermP htype = cur;
    for (size_t i = keep.size(); i-- > 0;)
      if (keep[i]) htype = mk_pi(hints[i], doms[i], close(htype, ws[i]));
    std::string h = supply_.fresh(g);
    key_[h] = key_[g] + 1e-6 * static_cast<double>(order_.size() + 1);
    types_[h] = htype;
    order_.push_back(h);
    std::vector<TermP> hargs;
    for (size_t i = 0; i < keep.size(); ++i)
      if (keep[i]) hargs.push_back(eta_var(ws[i], doms[i]));
    TermP sol = mk_free(h, std::move(hargs));
    {
      // Eta-expand in case h's result is itself functional (it never is for canonical g).
      sol = eta_expand(sol, cur);
    }
    for (size_t i = keep.size(); i-- > 0;) sol = mk_lam(hints[i], doms[i], close(sol, ws[i]));
    // doms were built in opened form; closing outer ws above also closes them.
    bind(g, sol);
  }

  // Ensure t only mentions allowed locals; prune flexible applications.
  void prune(const TermP& t, const std::set<std::string>& allowed, const std::vector<Entry>& locals) {
    switch (t->node) {
      case Node::Type:
        return;
      case Node::Pi:
      case Node::Lam: {
        if (t->dom) prune(t->dom, allowed, locals);
        std::string u = temp_name();
        std::set<std::string> inner = allowed;
        inner.insert(u);
        prune(open(t->body, u), inner, locals);
        return;
      }
      case Node::App: {
        if (t->head.kind == HeadKind::Free) {
          const std::string& h = t->head.name;
          if (is_local(locals, h) && !allowed.count(h)) no_solution("parameter escapes its scope");
          if (is_flex(h)) {
            std::vector<bool> keep;
            bool need = false;
            bool pattern = true;
            std::set<std::string> seen;
            for (auto& a : t->args) {
              auto v = as_eta_var(a);
              if (v && (is_local(locals, *v) || allowed.count(*v)) && seen.insert(*v).second) {
                bool ok = allowed.count(*v) > 0;
                keep.push_back(ok);
                need |= !ok;
              } else {
                pattern = false;
                keep.push_back(true);
              }
            }
            if (need && !pattern) outside("pruning a non-pattern application of " + h);
            if (!pattern) {
              for (auto& a : t->args)
                for (auto& fv : free_vars(a))
                  if (is_local(locals, fv) && !allowed.count(fv)) outside("parameter under a non-pattern application");
              return;
            }
            if (need) restrict_args(h, keep);
            return;
          }
        }
        for (auto& a : t->args) prune(a, allowed, locals);
        return;
      }
    }
  }

  TermP abstract_over(const TermP& body, const std::string& f, const std::vector<std::string>& ys) {
    TermP ty = type_of_flex(f);
    std::vector<TermP> doms;
    std::vector<std::string> hints;
    TermP cur = ty;
    for (size_t i = 0; i < ys.size(); ++i) {
      if (!cur || cur->node != Node::Pi) outside("cannot abstract " + f + " over its arguments");
      doms.push_back(cur->dom);
      hints.push_back(cur->hint.empty() ? "x" : cur->hint);
      cur = cur->body;
    }
    TermP sol = body;
    for (size_t i = ys.size(); i-- > 0;) sol = mk_lam(hints[i], doms[i], close(sol, ys[i]));
    return sol;
  }

  void flex_rigid(const TermP& s, const TermP& t, const std::vector<Entry>& locals) {
    const std::string f = s->head.name;
    auto ys = pattern_args(s, locals);
    if (!ys) outside("non-pattern application of " + f + " in " + show(s));
    if (occurs_free(t, f)) {
      if (occurs_rigid(t, f)) no_solution("occurs check on " + f);
      outside("flexible occurrence of " + f + " in " + show(t));
    }
    std::set<std::string> allowed(ys->begin(), ys->end());
    prune(t, allowed, locals);
    TermP t2 = hsubst(t, sigma_);
    if (occurs_free(t2, f)) no_solution("occurs check on " + f);
    bind(f, abstract_over(t2, f, *ys));
  }

  void flex_flex(const TermP& s, const TermP& t, const std::vector<Entry>& locals) {
    const std::string f = s->head.name;
    const std::string g = t->head.name;
    auto xs = pattern_args(s, locals);
    auto ys = pattern_args(t, locals);
    if (f == g) {
      if ((!xs || !ys) && decompose_ && s->args.size() == t->args.size()) {
        std::vector<Equation> eqs;
        for (size_t i = 0; i < s->args.size(); ++i) eqs.push_back({s->args[i], t->args[i], locals});
        push_front(std::move(eqs));
        return;
      }
      if (!xs || !ys) outside("non-pattern flexible equation on " + f);
      std::vector<bool> keep;
      for (size_t i = 0; i < xs->size(); ++i) keep.push_back((*xs)[i] == (*ys)[i]);
      restrict_args(f, keep);
      return;
    }
    if (xs && ys) {
      std::set<std::string> sx(xs->begin(), xs->end());
      std::set<std::string> sy(ys->begin(), ys->end());
      bool y_in_x = std::includes(sx.begin(), sx.end(), sy.begin(), sy.end());
      bool x_in_y = std::includes(sy.begin(), sy.end(), sx.begin(), sx.end());
      if (y_in_x && x_in_y) {
        if (key_[f] > key_[g]) return flex_rigid(s, t, locals);
        return flex_rigid(t, s, locals);
      }
      if (y_in_x) return flex_rigid(s, t, locals);
      if (x_in_y) return flex_rigid(t, s, locals);
      std::vector<bool> keep;
      for (auto& y : *ys) keep.push_back(sx.count(y) > 0);
      restrict_args(g, keep);
      return flex_rigid(s, hsubst(t, sigma_), locals);
    }
    if (xs) return flex_rigid(s, t, locals);
    if (ys) return flex_rigid(t, s, locals);
    outside("flexible-flexible equation outside the pattern fragment");
  }
};

bool strict_in(const TermP& t, const std::string& v, std::set<std::string>& bound) {
  switch (t->node) {
    case Node::Type:
      return false;
    case Node::Pi:
    case Node::Lam: {
      if (t->dom && strict_in(t->dom, v, bound)) return true;
      std::string u = temp_name();
      bound.insert(u);
      bool r = strict_in(open(t->body, u), v, bound);
      bound.erase(u);
      return r;
    }
    case Node::App: {
      if (t->head.kind == HeadKind::Free) {
        const std::string& h = t->head.name;
        if (h == v) {
          std::set<std::string> seen;
          for (auto& a : t->args) {
            auto x = as_eta_var(a);
            if (!x || !bound.count(*x) || !seen.insert(*x).second) return false;
          }
          return true;
        }
        if (!bound.count(h)) return false;
      }
      for (auto& a : t->args)
        if (strict_in(a, v, bound)) return true;
      return false;
    }
  }
  return false;
}

}  // namespace

UnifOutcome unify(const UnifProblem& p, const Signature& sig, NameSupply& supply) {
  (void)sig;
  Unifier u(p, supply);
  return u.run(p.flex);
}

bool strict_occurrence_exists(const TermP& t, const std::string& v) {
  std::set<std::string> bound;
  return strict_in(t, v, bound);
}

bool is_strict_term(const TermP& t, const std::vector<std::string>& vars) {
  for (auto& v : vars)
    if (!strict_occurrence_exists(t, v)) return false;
  return true;
}

UnifOutcome match_all(const std::vector<TermP>& patterns, const std::vector<TermP>& targets,
                      const Context& pattern_vars, const Signature& sig, NameSupply& supply) {
  for (auto& e : pattern_vars.entries) {
    bool strict = false;
    for (auto& p : patterns) strict |= strict_occurrence_exists(p, e.name);
    if (!strict) {
      UnifOutcome out;
      out.kind = UnifOutcome::Kind::OutsideFragment;
      out.reason = "pattern variable " + e.name + " has no strict occurrence";
      return out;
    }
  }
  UnifProblem p;
  p.ctx = pattern_vars;
  p.flex = pattern_vars.names();
  for (size_t i = 0; i < patterns.size() && i < targets.size(); ++i) p.add(patterns[i], targets[i]);
  return unify(p, sig, supply);
}

UnifOutcome match(const TermP& pattern, const TermP& target, const Context& pattern_vars, const Signature& sig,
                  NameSupply& supply) {
  return match_all({pattern}, {target}, pattern_vars, sig, supply);
}

std::optional<std::unordered_map<std::string, std::string>> as_renaming(const Subst& s) {
  std::unordered_map<std::string, std::string> r;
  std::set<std::string> image;
  for (auto& b : s.binds) {
    auto v = as_eta_var(b.term);
    if (!v || !image.insert(*v).second) return std::nullopt;
    r[b.var] = *v;
  }
  return r;
}

CasePermutation case_permutation(const Context& ctx, const std::string& x) {
  CasePermutation perm;
  const TermP* ax = ctx.lookup(x);
  if (!ax) throw LfError("case", "variable " + x + " is not in the context");
  perm.var = {x, *ax};
  std::vector<std::string> closure = dependency_closure(ctx, free_vars(*ax));
  std::set<std::string> in_prefix(closure.begin(), closure.end());
  for (auto& e : ctx.entries) {
    if (e.name == x) continue;
    if (in_prefix.count(e.name))
      perm.prefix.entries.push_back(e);
    else
      perm.rest.entries.push_back(e);
  }
  return perm;
}

CaseSplit split_on(const CasePermutation& perm, const Decl& constant, const Signature& sig, NameSupply& supply) {
  CaseSplit out;
  out.constant = constant.name;
  Context params;
  TermP cur = constant.type;
  while (cur->node == Node::Pi) {
    std::string n = supply.fresh(cur->hint.empty() || is_temp_name(cur->hint) ? "x" : cur->hint);
    params.push(n, cur->dom);
    cur = open(cur->body, n);
  }
  std::vector<TermP> args;
  for (auto& e : params.entries) args.push_back(eta_var(e.name, e.type));
  UnifProblem p;
  p.ctx = perm.prefix;
  p.ctx.entries.push_back(perm.var);
  for (auto& e : params.entries) p.ctx.entries.push_back(e);
  p.flex = p.ctx.names();
  p.add(perm.var.type, cur);
  p.add(eta_var(perm.var.name, perm.var.type), mk_const(constant.name, std::move(args)));
  UnifOutcome u = unify(p, sig, supply);
  out.reason = u.reason;
  if (u.kind == UnifOutcome::Kind::NoSolution) return out;
  if (u.kind == UnifOutcome::Kind::OutsideFragment) {
    out.kind = CaseSplit::Kind::OutsideFragment;
    return out;
  }
  out.kind = CaseSplit::Kind::Mgu;
  std::vector<std::string> keep = perm.prefix.names();
  keep.push_back(perm.var.name);
  out.mgu = restrict_subst(u.subst, keep);
  for (auto& b : out.mgu.binds)
    if (b.var != perm.var.name) out.moved_prefix = true;
  out.result = u.result;
  out.rest = apply_subst(perm.rest, out.mgu);
  const TermP* inst = out.mgu.lookup(perm.var.name);
  out.instance = inst ? *inst : eta_var(perm.var.name, perm.var.type);
  return out;
}

std::vector<const Decl*> constructors_of(const Signature& sig, const std::string& family) {
  std::vector<const Decl*> out;
  for (auto& d : sig.decls) {
    if (d.kind != DeclKind::Object) continue;
    TermP t = pi_target(d.type);
    if (t->node == Node::App && t->head.kind == HeadKind::Const && t->head.name == family) out.push_back(&d);
  }
  return out;
}

std::optional<std::unordered_map<std::string, std::string>> renaming_between(const std::vector<TermP>& from,
                                                                            const std::vector<TermP>& to,
                                                                            const Context& vars,
                                                                            const Signature& sig,
                                                                            NameSupply& supply) {
  if (from.size() != to.size()) return std::nullopt;
  // Rename the unifiable side apart so names shared with `to` stay rigid.
  SubstMap apart;
  std::unordered_map<std::string, std::string> back;
  UnifProblem p;
  for (auto& e : vars.entries) {
    std::string t = temp_name();
    TermP ty = hsubst(e.type, apart);
    apart[e.name] = eta_var(t, ty);
    back[t] = e.name;
    p.ctx.push(t, ty);
    p.flex.push_back(t);
  }
  for (size_t i = 0; i < from.size(); ++i) p.add(hsubst(from[i], apart), to[i]);
  UnifOutcome u = unify(p, sig, supply);
  if (!u.ok()) return std::nullopt;
  auto r = as_renaming(u.subst);
  if (!r) return std::nullopt;
  std::unordered_map<std::string, std::string> out;
  std::set<std::string> image;
  for (auto& e : vars.entries) {
    std::string t = *as_eta_var(apart[e.name]);
    auto it = r->find(t);
    std::string img = it != r->end() ? it->second : e.name;
    if (is_temp_name(img) || !image.insert(img).second) return std::nullopt;
    out[e.name] = img;
  }
  return out;
}

}  // namespace lfm2
