#include "lfm2/m2.h"

#include <algorithm>
#include <map>

namespace lfm2 {

namespace {

[[noreturn]] void fail(const std::string& kind, const std::string& msg) { throw M2Error(kind, msg); }

std::shared_ptr<ProofTerm> node(ProofTerm::Kind k) {
  auto p = std::make_shared<ProofTerm>();
  p->kind = k;
  return p;
}

void bump_supply(NameSupply& supply, const Context& ctx) {
  for (auto& e : ctx.entries) supply.next = std::max(supply.next, name_suffix(e.name) + 1);
}

// Exact equality of contexts: same names, alpha-equal types.
bool same_context(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a.entries[i].name != b.entries[i].name || !alpha_eq(a.entries[i].type, b.entries[i].type)) return false;
  return true;
}

bool same_domain(const Subst& s, const Context& target) {
  if (s.size() != target.size()) return false;
  for (size_t i = 0; i < s.size(); ++i)
    if (s.binds[i].var != target.entries[i].name) return false;
  return true;
}

void require_fresh(const Context& ctx, const Context& added, const std::string& rule) {
  std::set<std::string> seen;
  for (auto& e : ctx.entries) seen.insert(e.name);
  for (auto& e : added.entries) {
    if (is_temp_name(e.name) || !seen.insert(e.name).second)
      fail(rule, "variable " + e.name + " is not fresh");
  }
}

std::string show_ctx(const Context& c) {
  std::string s;
  for (auto& e : c.entries) s += (s.empty() ? "" : " ") + e.name;
  return "(" + s + ")";
}

struct RecFrame {
  std::string name;
  TerminationOrder order;
  std::vector<std::string> all_names;
  bool has_args = false;
  std::vector<TermP> args;
};

struct State {
  Context ctx;
  std::vector<Assumption> delta;
  Formula goal;
  std::vector<RecFrame> recs;
};

const Assumption* find_assumption(const std::vector<Assumption>& delta, const std::string& name) {
  for (size_t i = delta.size(); i-- > 0;)
    if (delta[i].name == name) return &delta[i];
  return nullptr;
}

class Checker {
 public:
  explicit Checker(const Signature& sig) : sig_(sig) {
    for (auto& d : sig.decls) supply_.next = std::max(supply_.next, name_suffix(d.name) + 1);
  }

  void go(State st, const ProofP& p, bool under_rec) {
    switch (p->kind) {
      case ProofTerm::Kind::Rec:
        rec(std::move(st), p);
        return;
      case ProofTerm::Kind::All:
        all(std::move(st), p, under_rec);
        return;
      case ProofTerm::Kind::Let:
        let(std::move(st), p);
        return;
      case ProofTerm::Kind::Split:
        split(std::move(st), p);
        return;
      case ProofTerm::Kind::Witness:
        witness(st, p);
        return;
      case ProofTerm::Kind::Case:
        cases(std::move(st), p);
        return;
    }
  }

 private:
  const Signature& sig_;
  NameSupply supply_;

  void rec(State st, const ProofP& p) {
    try {
      check_context(sig_, concat(p->formula.all, p->formula.ex));
    } catch (const LfError& e) {
      fail("RecFormulaInvalid", std::string("recursion formula is not closed and well formed: ") + e.what());
    }
    if (!formula_alpha_eq(p->formula, st.goal)) fail("RecFormulaMismatch", "recursion formula differs from the goal");
    if (find_assumption(st.delta, p->name)) fail("AssumptionNotFresh", "assumption " + p->name + " is already bound");
    for (int pos : p->order.positions())
      if (pos < 0 || static_cast<size_t>(pos) >= p->formula.all.size())
        fail("NonTerminatingRec", "order position " + std::to_string(pos) + " is not a universal variable");
    st.delta.push_back({p->name, p->formula});
    RecFrame fr;
    fr.name = p->name;
    fr.order = p->order;
    fr.all_names = p->formula.all.names();
    st.recs.push_back(fr);
    go(std::move(st), p->body, true);
  }

  void all(State st, const ProofP& p, bool under_rec) {
    if (!context_alpha_eq(st.goal.all, p->ctx))
      fail("AllIntroMismatch", "introduced context " + show_ctx(p->ctx) + " differs from the universal context " + show_ctx(st.goal.all));
    require_fresh(st.ctx, p->ctx, "AllIntroMismatch");
    SubstMap ren;
    for (size_t i = 0; i < p->ctx.size(); ++i)
      ren[st.goal.all.entries[i].name] = eta_var(p->ctx.entries[i].name, p->ctx.entries[i].type);
    Formula rest{{}, st.goal.ex};
    st.goal = subst_formula(rest, ren);
    st.ctx = concat(st.ctx, p->ctx);
    if (under_rec && !st.recs.empty() && !st.recs.back().has_args) {
      st.recs.back().has_args = true;
      for (auto& e : p->ctx.entries) st.recs.back().args.push_back(eta_var(e.name, e.type));
    }
    go(std::move(st), p->body, false);
  }

  void let(State st, const ProofP& p) {
    const Assumption* a = find_assumption(st.delta, p->target);
    if (!a) fail("UnknownAssumption", "assumption " + p->target + " is not bound");
    Formula fx = a->formula;
    if (!same_domain(p->subst, fx.all))
      fail("LetSubstMismatch", "substitution for " + p->target + " must bind exactly " + show_ctx(fx.all));
    for (size_t i = st.recs.size(); i-- > 0;) {
      const RecFrame& fr = st.recs[i];
      if (fr.name != p->target) continue;
      if (!fr.has_args) fail("NonTerminatingRec", "recursive call through " + fr.name + " before its arguments are introduced");
      std::vector<TermP> now;
      for (auto& b : p->subst.binds) now.push_back(b.term);
      if (!order_less(fr.order, now, fr.args)) fail("NonTerminatingRec", "recursive call through " + fr.name + " is not on smaller arguments");
      break;
    }
    try {
      check_subst_typing(st.ctx, sig_, p->subst, fx.all);
    } catch (const LfError& e) {
      fail("IllTypedSubstitution", std::string("instantiating ") + p->target + ": " + e.what());
    }
    if (find_assumption(st.delta, p->name)) fail("AssumptionNotFresh", "assumption " + p->name + " is already bound");
    st.delta.push_back({p->name, Formula{{}, instantiate_ex(fx, p->subst.map())}});
    go(std::move(st), p->body, false);
  }

  void split(State st, const ProofP& p) {
    const Assumption* a = find_assumption(st.delta, p->name);
    if (!a) fail("UnknownAssumption", "assumption " + p->name + " is not bound");
    if (!a->formula.all.empty()) fail("SplitMismatch", "assumption " + p->name + " is universally quantified");
    if (!context_alpha_eq(a->formula.ex, p->ctx))
      fail("SplitMismatch", "split context " + show_ctx(p->ctx) + " differs from the witnesses of " + p->name);
    require_fresh(st.ctx, p->ctx, "SplitMismatch");
    st.ctx = concat(st.ctx, p->ctx);
    go(std::move(st), p->body, false);
  }

  void witness(const State& st, const ProofP& p) {
    if (!st.goal.all.empty()) fail("WitnessMismatch", "goal still has universal variables " + show_ctx(st.goal.all));
    if (!same_domain(p->subst, st.goal.ex)) fail("WitnessMismatch", "witness must bind exactly " + show_ctx(st.goal.ex));
    try {
      check_subst_typing(st.ctx, sig_, p->subst, st.goal.ex);
    } catch (const LfError& e) {
      fail("IllTypedSubstitution", std::string("witness: ") + e.what());
    }
  }

  void cases(State st, const ProofP& p) {
    const TermP* ax = st.ctx.lookup(p->name);
    if (!ax) fail("CaseMguMismatch", "case variable " + p->name + " is not in the context");
    if ((*ax)->node != Node::App || (*ax)->head.kind != HeadKind::Const)
      fail("CaseMguMismatch", "case variable " + p->name + " does not have an atomic type");
    std::map<std::string, size_t> by_const;
    for (size_t i = 0; i < p->cases.size(); ++i) {
      const TermP& m = p->cases[i].instance;
      if (m->node != Node::App || m->head.kind != HeadKind::Const)
        fail("CaseMguMismatch", "case pattern " + show(m) + " is not headed by a constant");
      if (!by_const.emplace(m->head.name, i).second) fail("CaseMguMismatch", "two cases for " + m->head.name);
    }
    bump_supply(supply_, st.ctx);
    CasePermutation perm = case_permutation(st.ctx, p->name);
    std::set<std::string> used;
    for (const Decl* c : constructors_of(sig_, (*ax)->head.name)) {
      CaseSplit cs = split_on(perm, *c, sig_, supply_);
      auto it = by_const.find(c->name);
      if (cs.kind == CaseSplit::Kind::OutsideFragment)
        fail("UnificationUndecided", "case on " + p->name + " with " + c->name + ": " + cs.reason);
      if (cs.kind == CaseSplit::Kind::NoSolution) {
        if (it != by_const.end()) fail("CaseMguMismatch", "case " + c->name + " on " + p->name + " is impossible");
        continue;
      }
      if (it == by_const.end()) fail("CaseNotExhaustive", "case on " + p->name + " is missing " + c->name);
      used.insert(c->name);
      const CaseBranch& br = p->cases[it->second];
      auto ren = renaming_between({cs.instance}, {br.instance}, cs.result, sig_, supply_);
      if (!ren) fail("CaseMguMismatch", "case " + c->name + " on " + p->name + ": pattern is not the mgu instance");
      SubstMap m;
      Context result;
      for (auto& e : cs.result.entries) {
        TermP ty = hsubst(e.type, m);
        const std::string& n = ren->at(e.name);
        m[e.name] = eta_var(n, ty);
        result.push(n, ty);
      }
      if (!same_context(result, br.result))
        fail("CaseMguMismatch", "case " + c->name + " on " + p->name + ": pattern context differs from the mgu");
      Context rest = cs.rest;
      for (auto& e : rest.entries) e.type = hsubst(e.type, m);
      if (!same_context(rest, br.rest))
        fail("CaseMguMismatch", "case " + c->name + " on " + p->name + ": remaining context differs");
      SubstMap sigma;
      for (auto& b : cs.mgu.binds) sigma[b.var] = hsubst(b.term, m);
      State next;
      next.ctx = concat(br.result, br.rest);
      for (auto& a : st.delta) next.delta.push_back({a.name, subst_formula(a.formula, sigma)});
      next.goal = subst_formula(st.goal, sigma);
      next.recs = st.recs;
      for (auto& fr : next.recs)
        for (auto& t : fr.args) t = hsubst(t, sigma);
      go(std::move(next), br.body, false);
    }
    for (auto& [c, i] : by_const)
      if (!used.count(c)) fail("CaseMguMismatch", "case " + c + " does not belong to the type of " + p->name);
  }

 public:
  void start(const State& st, const ProofP& p, bool under_rec) { go(st, p, under_rec); }
};

class Executor {
 public:
  Executor(const Signature& sig, unsigned long fuel) : sig_(sig), fuel_(fuel) {}

  struct Env {
    SubstMap vals;
    std::map<std::string, ProofP> recs;
    std::map<std::string, std::vector<TermP>> results;
  };

  std::vector<TermP> run(const ProofP& p, Env env, const std::vector<TermP>& pending) {
    if (fuel_ == 0) fail("FuelExhausted", "proof execution ran out of fuel");
    --fuel_;
    switch (p->kind) {
      case ProofTerm::Kind::Rec:
        env.recs[p->name] = p;
        return run(p->body, std::move(env), pending);
      case ProofTerm::Kind::All:
        if (pending.size() != p->ctx.size()) fail("NoCaseMatches", "wrong number of universal inputs");
        for (size_t i = 0; i < p->ctx.size(); ++i) env.vals[p->ctx.entries[i].name] = pending[i];
        return run(p->body, std::move(env), {});
      case ProofTerm::Kind::Let: {
        std::vector<TermP> args;
        for (auto& b : p->subst.binds) args.push_back(hsubst(b.term, env.vals));
        auto r = env.recs.find(p->target);
        if (r != env.recs.end()) {
          Env inner;
          inner.recs[r->first] = r->second;
          env.results[p->name] = run(r->second->body, std::move(inner), args);
        } else {
          auto it = env.results.find(p->target);
          if (it == env.results.end()) fail("NoCaseMatches", "assumption " + p->target + " has no value");
          env.results[p->name] = it->second;
        }
        return run(p->body, std::move(env), {});
      }
      case ProofTerm::Kind::Split: {
        auto it = env.results.find(p->name);
        if (it == env.results.end() || it->second.size() != p->ctx.size())
          fail("NoCaseMatches", "assumption " + p->name + " has no witnesses");
        for (size_t i = 0; i < p->ctx.size(); ++i) env.vals[p->ctx.entries[i].name] = it->second[i];
        return run(p->body, std::move(env), {});
      }
      case ProofTerm::Kind::Witness: {
        std::vector<TermP> out;
        for (auto& b : p->subst.binds) out.push_back(hsubst(b.term, env.vals));
        return out;
      }
      case ProofTerm::Kind::Case: {
        auto v = env.vals.find(p->name);
        if (v == env.vals.end()) fail("NoCaseMatches", "case variable " + p->name + " has no value");
        const TermP& val = v->second;
        for (auto& br : p->cases) {
          if (br.instance->head.name != val->head.name) continue;
          UnifOutcome u = match(br.instance, val, br.result, sig_, supply_);
          if (!u.ok()) fail("NoCaseMatches", "value " + show(val) + " does not match " + show(br.instance));
          Env next = env;
          next.vals.erase(p->name);
          for (auto& b : u.subst.binds) next.vals[b.var] = b.term;
          return run(br.body, std::move(next), {});
        }
        fail("NoCaseMatches", "no case for " + show(val));
      }
    }
    fail("NoCaseMatches", "unknown proof term");
  }

 private:
  const Signature& sig_;
  unsigned long fuel_;
  NameSupply supply_;
};

}  // namespace

ProofP mk_rec(std::string name, Formula f, TerminationOrder order, ProofP body) {
  auto p = node(ProofTerm::Kind::Rec);
  p->name = std::move(name);
  p->formula = std::move(f);
  p->order = std::move(order);
  p->body = std::move(body);
  return p;
}

ProofP mk_all(Context ctx, ProofP body) {
  auto p = node(ProofTerm::Kind::All);
  p->ctx = std::move(ctx);
  p->body = std::move(body);
  return p;
}

ProofP mk_let(std::string name, std::string target, Subst s, ProofP body) {
  auto p = node(ProofTerm::Kind::Let);
  p->name = std::move(name);
  p->target = std::move(target);
  p->subst = std::move(s);
  p->body = std::move(body);
  return p;
}

ProofP mk_split(std::string name, Context ctx, ProofP body) {
  auto p = node(ProofTerm::Kind::Split);
  p->name = std::move(name);
  p->ctx = std::move(ctx);
  p->body = std::move(body);
  return p;
}

ProofP mk_witness(Subst s) {
  auto p = node(ProofTerm::Kind::Witness);
  p->subst = std::move(s);
  return p;
}

ProofP mk_case(std::string var, std::vector<CaseBranch> cases) {
  auto p = node(ProofTerm::Kind::Case);
  p->name = std::move(var);
  p->cases = std::move(cases);
  return p;
}

Formula family_to_formula(const ModedFamily& mf) {
  Formula f;
  f.all = mf.inputs();
  f.ex = mf.outputs();
  std::set<std::string> taken;
  for (auto& p : mf.params) taken.insert(p.name);
  std::string d = "D";
  for (int k = 0; taken.count(d); ++k) d = "D" + std::string(static_cast<size_t>(k + 1), '\'');
  f.ex.push(d, mf.apply({}));
  return f;
}

bool context_alpha_eq(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  SubstMap ren;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!alpha_eq(hsubst(a.entries[i].type, ren), b.entries[i].type)) return false;
    ren[a.entries[i].name] = eta_var(b.entries[i].name, b.entries[i].type);
  }
  return true;
}

bool formula_alpha_eq(const Formula& a, const Formula& b) {
  return a.all.size() == b.all.size() && context_alpha_eq(concat(a.all, a.ex), concat(b.all, b.ex));
}

Formula subst_formula(const Formula& f, const SubstMap& s) {
  // Only bindings for variables free in the formula matter, and only their
  // values can capture.
  std::set<std::string> bound, free;
  for (auto* c : {&f.all, &f.ex})
    for (auto& e : c->entries) {
      for (auto& n : free_vars(e.type))
        if (!bound.count(n)) free.insert(n);
      bound.insert(e.name);
    }
  SubstMap cur;
  std::set<std::string> danger;
  for (auto& [k, v] : s)
    if (free.count(k)) {
      cur[k] = v;
      for (auto& n : free_vars(v)) danger.insert(n);
    }
  auto walk = [&](const Context& c) {
    Context out;
    for (auto& e : c.entries) {
      TermP ty = hsubst(e.type, cur);
      if (danger.count(e.name)) {
        std::string n = temp_name();
        cur[e.name] = eta_var(n, ty);
        out.push(n, ty);
      } else {
        cur.erase(e.name);
        out.push(e.name, ty);
      }
    }
    return out;
  };
  Formula out;
  out.all = walk(f.all);
  out.ex = walk(f.ex);
  return out;
}

Context instantiate_ex(const Formula& f, const SubstMap& s) {
  SubstMap only;
  for (auto& e : f.all.entries) {
    auto it = s.find(e.name);
    if (it != s.end()) only[e.name] = it->second;
  }
  return subst_formula(Formula{{}, f.ex}, only).ex;
}

void check_proof(const Sequent& s, const ProofP& p, const Signature& sig) {
  Checker c(sig);
  State st;
  st.ctx = s.ctx;
  st.delta = s.delta;
  st.goal = s.goal;
  c.start(st, p, false);
}

bool proofterm_terminates(const ProofP& body, const std::string& rec_var, const Formula& f, const TerminationOrder& order,
                          const Signature& sig) {
  Checker c(sig);
  State st;
  st.delta.push_back({rec_var, f});
  st.goal = f;
  RecFrame fr;
  fr.name = rec_var;
  fr.order = order;
  fr.all_names = f.all.names();
  st.recs.push_back(fr);
  try {
    c.start(st, body, true);
  } catch (const M2Error& e) {
    if (e.kind == "NonTerminatingRec") return false;
    throw;
  }
  return true;
}

Subst execute(const ProofP& rec, const Subst& inputs, const Signature& sig, unsigned long fuel) {
  if (rec->kind != ProofTerm::Kind::Rec) fail("NoCaseMatches", "execution starts at a recursion");
  std::vector<TermP> args;
  for (auto& e : rec->formula.all.entries) {
    const TermP* v = inputs.lookup(e.name);
    if (!v) fail("NoCaseMatches", "no input for " + e.name);
    args.push_back(*v);
  }
  Executor ex(sig, fuel);
  std::vector<TermP> vals = ex.run(rec, {}, args);
  Subst out;
  for (size_t i = 0; i < rec->formula.ex.size() && i < vals.size(); ++i) out.binds.push_back({rec->formula.ex.entries[i].name, vals[i]});
  return out;
}

}  // namespace lfm2
