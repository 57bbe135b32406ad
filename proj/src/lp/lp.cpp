#include "lfm2/lp.h"

#include "lfm2/unify.h"

namespace lfm2 {

namespace {

bool depends_on_binder(const TermP& pi) {
  std::string t = temp_name();
  return occurs_free(open(pi->body, t), t);
}

std::string unique_name(std::string base, std::set<std::string>& used) {
  if (base.empty() || is_temp_name(base)) base = "x";
  if (used.insert(base).second) return base;
  for (int k = 1;; ++k) {
    std::string cand = base + std::to_string(k);
    if (used.insert(cand).second) return cand;
  }
}

}  // namespace

std::string family_head(const TermP& a) {
  TermP t = pi_target(a);
  if (t->node == Node::App && t->head.kind == HeadKind::Const) return t->head.name;
  return "";
}

Clause decompose_clause(const std::string& name, const TermP& type, const std::set<std::string>& avoid) {
  Clause c;
  c.name = name;
  std::set<std::string> used = avoid;
  collect_consts(type, used);
  for (auto& fv : free_vars(type)) used.insert(fv);
  TermP cur = type;
  std::vector<size_t> premise_binders;
  while (cur->node == Node::Pi) {
    bool dep = depends_on_binder(cur);
    std::string n = unique_name(cur->hint.empty() ? (dep ? "x" : "P") : cur->hint, used);
    ClauseBinder b{n, cur->dom, -1};
    if (dep) {
      c.vars.push(n, cur->dom);
    } else {
      premise_binders.push_back(c.binders.size());
      c.premises.push_back(cur->dom);
    }
    c.binders.push_back(b);
    cur = open(cur->body, n);
  }
  c.head = cur;
  std::reverse(c.premises.begin(), c.premises.end());
  int k = static_cast<int>(premise_binders.size());
  for (int j = 0; j < k; ++j) c.binders[premise_binders[static_cast<size_t>(j)]].premise = k - 1 - j;
  return c;
}

TermP Clause::apply(const SubstMap& values, const std::vector<TermP>& premise_proofs) const {
  std::vector<TermP> args;
  for (auto& b : binders) {
    if (b.premise >= 0) {
      args.push_back(premise_proofs.at(static_cast<size_t>(b.premise)));
    } else {
      auto it = values.find(b.name);
      args.push_back(it != values.end() ? it->second : eta_var(b.name, hsubst(b.type, values)));
    }
  }
  return mk_const(name, std::move(args));
}

TermP Clause::apply_names(const std::vector<std::string>& premise_names) const {
  std::vector<TermP> proofs;
  for (size_t i = 0; i < premises.size(); ++i) proofs.push_back(eta_var(premise_names.at(i), premises[i]));
  return apply({}, proofs);
}

std::vector<Clause> clauses_for(const Signature& sig, const std::string& family) {
  std::vector<Clause> out;
  for (auto& d : sig.decls)
    if (d.kind == DeclKind::Object && family_head(d.type) == family) out.push_back(decompose_clause(d.name, d.type));
  return out;
}

namespace {

struct State {
  Context lvars;
  SubstMap theta;
};

using Cont = std::function<bool(State&, const TermP&)>;  // true = stop

class Solver {
 public:
  Solver(const Signature& sig, unsigned long budget) : sig_(sig), budget_(budget) {}

  NameSupply supply;

  bool goal(const std::vector<Entry>& locals, const TermP& g0, State st, const Cont& k) {
    TermP g = hsubst(g0, st.theta);
    if (g->node == Node::Pi) {
      std::string u = supply.fresh(g->hint.empty() ? "x" : g->hint);
      std::vector<Entry> inner = locals;
      inner.push_back({u, g->dom});
      std::string hint = g->hint;
      TermP dom = g->dom;
      return goal(inner, open(g->body, u), std::move(st), [&, u, hint, dom](State& s, const TermP& p) {
        TermP body = close(hsubst(p, s.theta), u);
        return k(s, mk_lam(hint, hsubst(dom, s.theta), body));
      });
    }
    std::string fam = family_head(g);
    for (size_t i = locals.size(); i-- > 0;) {
      Clause c = decompose_clause(locals[i].name, hsubst(locals[i].type, st.theta));
      if (family_head(c.head) != fam) continue;
      if (backchain(locals, g, c, true, st, k)) return true;
    }
    auto it = clauses_.find(fam);
    if (it == clauses_.end()) it = clauses_.emplace(fam, clauses_for(sig_, fam)).first;
    for (auto& c : it->second)
      if (backchain(locals, g, c, false, st, k)) return true;
    return false;
  }

 private:
  const Signature& sig_;
  unsigned long budget_;
  unsigned long attempts_ = 0;
  std::unordered_map<std::string, std::vector<Clause>> clauses_;

  bool backchain(const std::vector<Entry>& locals, const TermP& g, const Clause& c, bool local_head, State st,
                 const Cont& k) {
    if (++attempts_ > budget_) throw LpError("BudgetExhausted", "backchaining budget of " + std::to_string(budget_) + " exhausted");
    // Fresh logic variables for the clause, raised over the local parameters.
    SubstMap inst;
    for (auto& e : c.vars.entries) {
      TermP ty = hsubst(e.type, inst);
      TermP raised = ty;
      for (size_t i = locals.size(); i-- > 0;) raised = mk_pi(locals[i].name, locals[i].type, close(raised, locals[i].name));
      std::string v = supply.fresh(e.name);
      st.lvars.push(v, raised);
      std::vector<TermP> args;
      for (auto& l : locals) args.push_back(eta_var(l.name, l.type));
      inst[e.name] = eta_expand(mk_free(v, std::move(args)), ty);
    }
    TermP head = hsubst(c.head, inst);
    UnifProblem p;
    p.ctx = st.lvars;
    p.flex = st.lvars.names();
    p.eqs.push_back({head, g, locals});
    UnifOutcome u = unify(p, sig_, supply);
    if (u.kind == UnifOutcome::Kind::OutsideFragment) throw LpError("OutsideFragment", u.reason);
    if (!u.ok()) return false;
    commit(st, u);
    std::vector<TermP> premises;
    for (auto& a : c.premises) premises.push_back(hsubst(a, inst));
    std::vector<TermP> proofs;
    return premises_from(locals, premises, 0, proofs, st, [&](State& s, const TermP&) {
      SubstMap values;
      for (auto& [name, val] : inst) values[name] = hsubst(val, s.theta);
      std::vector<TermP> ps;
      for (auto& pr : proofs) ps.push_back(hsubst(pr, s.theta));
      TermP proof = c.apply(values, ps);
      if (local_head) proof = mk_free(c.name, proof->args);
      return k(s, proof);
    });
  }

  bool premises_from(const std::vector<Entry>& locals, const std::vector<TermP>& premises, size_t i,
                     std::vector<TermP>& proofs, State st, const Cont& k) {
    if (i == premises.size()) return k(st, nullptr);
    return goal(locals, premises[i], std::move(st), [&, i](State& s, const TermP& p) {
      proofs.push_back(p);
      bool stop = premises_from(locals, premises, i + 1, proofs, s, k);
      proofs.pop_back();
      return stop;
    });
  }

  static void commit(State& st, const UnifOutcome& u) {
    SubstMap sigma = u.subst.map();
    for (auto& [name, val] : st.theta) val = hsubst(val, sigma);
    for (auto& [name, val] : sigma) st.theta[name] = val;
    st.lvars = u.result;
  }
};

}  // namespace

void solve(const Goal& g, const Signature& sig, const std::function<bool(const Solution&)>& on_solution) {
  Solver s(sig, g.budget);
  for (auto& e : g.vars.entries) s.supply.next = std::max(s.supply.next, name_suffix(e.name) + 1);
  State st;
  st.lvars = g.vars;
  s.goal({}, g.target, st, [&](State& fin, const TermP& proof) {
    Solution sol;
    sol.proof = hsubst(proof, fin.theta);
    for (auto& e : g.vars.entries) {
      auto it = fin.theta.find(e.name);
      if (it != fin.theta.end()) sol.answer.binds.push_back({e.name, it->second});
    }
    sol.residual = fin.lvars;
    return !on_solution(sol);
  });
}

std::vector<Solution> solve_all(const Goal& goal, const Signature& sig, size_t limit) {
  std::vector<Solution> out;
  if (limit == 0) return out;
  solve(goal, sig, [&](const Solution& s) {
    out.push_back(s);
    return out.size() < limit;
  });
  return out;
}

std::optional<Solution> solve_first(const Goal& goal, const Signature& sig) {
  auto v = solve_all(goal, sig, 1);
  if (v.empty()) return std::nullopt;
  return v.front();
}

}  // namespace lfm2
