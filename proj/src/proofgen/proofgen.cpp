#include "lfm2/proofgen.h"

#include <algorithm>
#include <map>

namespace lfm2 {

namespace {

[[noreturn]] void broken(const std::string& msg) { throw ProofGenError("InstantiationBroken", msg); }
[[noreturn]] void invariant(const std::string& msg) { throw ProofGenError("InvariantViolation", msg); }

SubstMap input_values(const ModedFamily& mf, const std::vector<TermP>& inputs) {
  SubstMap m;
  for (size_t j = 0; j < mf.input_order.size() && j < inputs.size(); ++j)
    m[mf.params[static_cast<size_t>(mf.input_order[j])].name] = inputs[j];
  return m;
}

TermP goal_proposition(const ModedFamily& mf, const CoverageGoal& g) {
  SubstMap m = input_values(mf, g.inputs);
  for (size_t j = 0; j < mf.output_order.size() && j < g.outputs.size(); ++j)
    m[mf.params[static_cast<size_t>(mf.output_order[j])].name] = g.outputs[j];
  return mf.apply(m);
}

bool same_context(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a.entries[i].name != b.entries[i].name || !alpha_eq(a.entries[i].type, b.entries[i].type)) return false;
  return true;
}

// Renames the entries of `c` under `sigma` into `target`, extending both.
Context introduce(const Context& c, SubstMap& sigma, Context& target, NameSupply& supply) {
  Context out;
  for (auto& e : c.entries) {
    TermP ty = hsubst(e.type, sigma);
    std::string n = e.name;
    if (target.contains(n) || out.contains(n)) n = supply.fresh(e.name);
    sigma[e.name] = eta_var(n, ty);
    out.push(n, ty);
  }
  target = concat(target, out);
  return out;
}

Subst map_subst(const Subst& s, const SubstMap& sigma) {
  Subst out;
  for (auto& b : s.binds) out.binds.push_back({b.var, hsubst(b.term, sigma)});
  return out;
}

class Instantiator {
 public:
  Instantiator(const Signature& sig, NameSupply& supply) : sig_(sig), supply_(supply) {}

  ProofP go(const ProofP& p, SubstMap sigma, Context target) {
    switch (p->kind) {
      case ProofTerm::Kind::Rec:
        broken("clause proofs do not contain recursion");
      case ProofTerm::Kind::All: {
        Context c = introduce(p->ctx, sigma, target, supply_);
        return mk_all(c, go(p->body, std::move(sigma), std::move(target)));
      }
      case ProofTerm::Kind::Let:
        return mk_let(p->name, p->target, map_subst(p->subst, sigma), go(p->body, sigma, std::move(target)));
      case ProofTerm::Kind::Split: {
        Context c = introduce(p->ctx, sigma, target, supply_);
        return mk_split(p->name, c, go(p->body, std::move(sigma), std::move(target)));
      }
      case ProofTerm::Kind::Witness:
        return mk_witness(map_subst(p->subst, sigma));
      case ProofTerm::Kind::Case:
        return cases(p, sigma, target);
    }
    broken("unknown proof term");
  }

 private:
  const Signature& sig_;
  NameSupply& supply_;

  ProofP cases(const ProofP& p, const SubstMap& sigma, const Context& target) {
    auto it = sigma.find(p->name);
    if (it == sigma.end()) broken("case variable " + p->name + " is not mapped");
    auto xv = as_eta_var(it->second);
    if (!xv || !target.contains(*xv)) broken("case variable " + p->name + " is not mapped to a variable");
    const TermP& ax = *target.lookup(*xv);
    if (ax->node != Node::App || ax->head.kind != HeadKind::Const) broken(*xv + " does not have an atomic type");
    for (auto& e : target.entries) supply_.next = std::max(supply_.next, name_suffix(e.name) + 1);
    CasePermutation perm = case_permutation(target, *xv);
    std::map<std::string, CaseSplit> computed;
    for (const Decl* c : constructors_of(sig_, ax->head.name)) {
      CaseSplit cs = split_on(perm, *c, sig_, supply_);
      if (cs.kind == CaseSplit::Kind::OutsideFragment) broken("case on " + *xv + " with " + c->name + " is undecided");
      if (cs.kind == CaseSplit::Kind::NoSolution) continue;
      if (cs.moved_prefix) broken("case on " + *xv + " with " + c->name + " instantiates the prefix");
      computed.emplace(c->name, std::move(cs));
    }
    if (computed.size() != p->cases.size()) broken("case on " + *xv + " has a different set of constructors");
    std::vector<CaseBranch> out;
    for (auto& br : p->cases) {
      auto ct = computed.find(br.instance->head.name);
      if (ct == computed.end()) broken("case " + br.instance->head.name + " on " + *xv + " disappeared");
      const CaseSplit& cs = ct->second;
      // Variables the old case introduced are resolved by matching the old
      // instance against the new one.
      SubstMap apart;
      std::vector<std::pair<std::string, std::string>> fresh_vars;
      UnifProblem prob;
      for (auto& e : br.result.entries) {
        if (sigma.count(e.name)) continue;
        std::string t = temp_name();
        SubstMap both = sigma;
        for (auto& [k, v] : apart) both[k] = v;
        TermP ty = hsubst(e.type, both);
        apart[e.name] = eta_var(t, ty);
        prob.ctx.push(t, ty);
        prob.flex.push_back(t);
        fresh_vars.push_back({e.name, t});
      }
      SubstMap both = sigma;
      for (auto& [k, v] : apart) both[k] = v;
      prob.add(hsubst(br.instance, both), cs.instance);
      UnifOutcome u = unify(prob, sig_, supply_);
      if (!u.ok() || !u.result.empty())
        broken("case " + cs.constant + " on " + *xv + " does not match the instantiated mgu");
      SubstMap mgu = cs.mgu.map();
      SubstMap next;
      for (auto& e : br.result.entries) {
        if (sigma.count(e.name)) {
          next[e.name] = hsubst(sigma.at(e.name), mgu);
          continue;
        }
        std::string t;
        for (auto& [n, tn] : fresh_vars)
          if (n == e.name) t = tn;
        const TermP* v = u.subst.lookup(t);
        if (!v) broken("case " + cs.constant + " on " + *xv + " leaves " + e.name + " undetermined");
        next[e.name] = *v;
      }
      for (auto& e : br.rest.entries) {
        auto s = sigma.find(e.name);
        if (s == sigma.end()) broken("remaining variable " + e.name + " is not mapped");
        next[e.name] = hsubst(s->second, mgu);
      }
      Context tgt = concat(cs.result, cs.rest);
      out.push_back({cs.result, cs.rest, cs.instance, go(br.body, std::move(next), std::move(tgt))});
    }
    return mk_case(*xv, std::move(out));
  }
};

class Generator {
 public:
  Generator(const TotalityResult& r, const Signature& sig, NameSupply& supply)
      : r_(r), sig_(sig), supply_(supply), f_(family_to_formula(r.mf)) {}

  ProofP clause_proof(size_t clause) { return build(r_.clause_results.at(clause), 0); }

 private:
  const TotalityResult& r_;
  const Signature& sig_;
  NameSupply& supply_;
  Formula f_;

  // Proof of the sequent over the context after `i` premises.
  ProofP build(const ClauseResult& cr, size_t i) {
    const ClauseScaffold& sc = cr.scaffold;
    const ModedFamily& mf = r_.mf;
    if (i == sc.premise_args.size()) {
      Subst w;
      for (int k : mf.output_order) w.binds.push_back({mf.params[static_cast<size_t>(k)].name, sc.head_args[static_cast<size_t>(k)]});
      w.binds.push_back({f_.ex.entries.back().name, sc.clause.apply_names(sc.premise_names)});
      return mk_witness(w);
    }
    const auto& args = sc.premise_args[i];
    Subst inputs;
    for (int k : mf.input_order) inputs.binds.push_back({mf.params[static_cast<size_t>(k)].name, args[static_cast<size_t>(k)]});
    const TraceP& trace = cr.output_traces.at(i);
    if (!trace) invariant("missing output trace for " + sc.clause.name);
    const CoverageGoal& root = trace->goal;
    std::string y = supply_.fresh("ih");
    std::string d = supply_.fresh("D");
    Context split;
    for (auto& e : root.ctx.entries)
      if (!root.is_frozen(e.name)) split.entries.push_back(e);
    split.push(d, goal_proposition(mf, root));
    Sequent seq;
    seq.ctx = concat(sc.contexts[i], split);
    seq.goal = Formula{{}, instantiate_ex(f_, input_values(mf, input_args(mf, sc.head_args)))};
    return mk_let(y, kInductionHypothesis, inputs, mk_split(y, split, replay_output(cr, i, trace, d, seq)));
  }

  // `seq` is the frontier sequent paired with `node`; its goal formula only
  // mentions frozen variables, so case steps must leave it unchanged.
  ProofP replay_output(const ClauseResult& cr, size_t i, const TraceP& node, const std::string& d, const Sequent& seq) {
    const ModedFamily& mf = r_.mf;
    if (!roc_holds(node->goal, seq, mf)) invariant("output goal and sequent do not correspond");
    switch (node->kind) {
      case TraceNode::Kind::Failed:
        invariant("output trace of " + cr.scaffold.clause.name + " has a failed leaf");
      case TraceNode::Kind::Split: {
        std::vector<CaseBranch> branches;
        CasePermutation perm = case_permutation(seq.ctx, node->var);
        for (auto& c : node->children) {
          Context rest = c.split.rest;
          rest.push(d, goal_proposition(mf, c.node->goal));
          Sequent child = seq;
          child.ctx = concat(c.split.result, apply_subst(perm.rest, c.split.mgu));
          child.goal = subst_formula(seq.goal, c.split.mgu.map());
          if (!formula_alpha_eq(child.goal, seq.goal)) invariant("output case step changed the goal formula");
          branches.push_back({c.split.result, rest, c.split.instance, replay_output(cr, i, c.node, d, child)});
        }
        return mk_case(node->var, std::move(branches));
      }
      case TraceNode::Kind::Covered: {
        const ClauseScaffold& sc = cr.scaffold;
        const CoverageGoal& g = node->goal;
        Context target = g.ctx;
        target.push(d, goal_proposition(mf, g));
        SubstMap sigma;
        for (auto& e : sc.contexts[i].entries) {
          const TermP* ty = g.ctx.lookup(e.name);
          if (!ty) invariant("clause prefix variable " + e.name + " lost during output splitting");
          sigma[e.name] = eta_var(e.name, *ty);
        }
        for (auto& b : node->witness.binds) sigma[b.var] = b.term;
        sigma[sc.premise_names[i]] = eta_var(d, target.entries.back().type);
        Instantiator inst(sig_, supply_);
        return inst.go(build(cr, i + 1), sigma, target);
      }
    }
    invariant("unknown trace node");
  }
};

}  // namespace

TerminationOrder order_over_inputs(const ModedFamily& mf, const TerminationOrder& order) {
  if (order.kind == TerminationOrder::Kind::Subterm) {
    auto it = std::find(mf.input_order.begin(), mf.input_order.end(), order.position);
    if (it == mf.input_order.end()) invariant("termination order names an output parameter");
    return TerminationOrder::arg(static_cast<int>(it - mf.input_order.begin()));
  }
  std::vector<TerminationOrder> parts;
  for (auto& p : order.parts) parts.push_back(order_over_inputs(mf, p));
  return order.kind == TerminationOrder::Kind::Lex ? TerminationOrder::lex(std::move(parts)) : TerminationOrder::simul(std::move(parts));
}

ProofP initial_step(const ModedFamily& mf, const TerminationOrder& order, ProofP body) {
  Formula f = family_to_formula(mf);
  return mk_rec(kInductionHypothesis, f, order_over_inputs(mf, order), mk_all(f.all, std::move(body)));
}

Sequent initial_sequent(const ModedFamily& mf) {
  Formula f = family_to_formula(mf);
  Sequent s;
  s.ctx = f.all;
  s.delta.push_back({kInductionHypothesis, f});
  s.goal = Formula{{}, f.ex};
  return s;
}

bool rsc_holds(const CoverageGoal& g, const Sequent& s, const ModedFamily& mf) {
  if (g.kind != CoverageGoal::Kind::Input || !same_context(g.ctx, s.ctx) || !s.goal.all.empty()) return false;
  Formula f = family_to_formula(mf);
  bool has_ih = false;
  for (auto& a : s.delta) has_ih |= a.name == kInductionHypothesis && formula_alpha_eq(a.formula, f);
  return has_ih && formula_alpha_eq(s.goal, Formula{{}, instantiate_ex(f, input_values(mf, g.inputs))});
}

bool roc_holds(const CoverageGoal& g, const Sequent& s, const ModedFamily& mf) {
  if (g.kind != CoverageGoal::Kind::Output || s.ctx.size() != g.ctx.size() + 1) return false;
  Context prefix;
  prefix.entries.assign(s.ctx.entries.begin(), s.ctx.entries.end() - 1);
  return same_context(prefix, g.ctx) && alpha_eq(s.ctx.entries.back().type, goal_proposition(mf, g));
}

Sequent clause_sequent(const TotalityResult& r, size_t clause) {
  const ClauseScaffold& sc = r.clause_results.at(clause).scaffold;
  Formula f = family_to_formula(r.mf);
  Sequent s;
  s.ctx = sc.contexts.at(0);
  s.delta.push_back({kInductionHypothesis, f});
  s.goal = Formula{{}, instantiate_ex(f, input_values(r.mf, input_args(r.mf, sc.head_args)))};
  return s;
}

ProofP translate_clause(const TotalityResult& r, size_t clause, const Signature& sig, NameSupply& supply) {
  Generator g(r, sig, supply);
  return g.clause_proof(clause);
}

ProofP instantiate_proof(const ProofP& p, const SubstMap& sigma, const Context& target, const Signature& sig,
                         NameSupply& supply) {
  Instantiator inst(sig, supply);
  return inst.go(p, sigma, target);
}

ProofP replay_input_trace(const TotalityResult& r, const std::function<ProofP(const TraceNode&)>& leaf) {
  std::function<ProofP(const TraceP&, const Sequent&)> go = [&](const TraceP& node, const Sequent& seq) -> ProofP {
    if (!rsc_holds(node->goal, seq, r.mf)) invariant("input goal and sequent do not correspond");
    switch (node->kind) {
      case TraceNode::Kind::Failed:
        invariant("input trace has a failed leaf");
      case TraceNode::Kind::Covered:
        return leaf(*node);
      case TraceNode::Kind::Split: {
        std::vector<CaseBranch> branches;
        for (auto& c : node->children) {
          SubstMap mgu = c.split.mgu.map();
          Sequent next;
          next.ctx = concat(c.split.result, c.split.rest);
          for (auto& a : seq.delta) next.delta.push_back({a.name, subst_formula(a.formula, mgu)});
          next.goal = subst_formula(seq.goal, mgu);
          branches.push_back({c.split.result, c.split.rest, c.split.instance, go(c.node, next)});
        }
        return mk_case(node->var, std::move(branches));
      }
    }
    invariant("unknown trace node");
  };
  return go(r.input_trace, initial_sequent(r.mf));
}

ProofP generate(const TotalityResult& r, const Signature& sig, NameSupply& supply) {
  std::map<std::string, size_t> clause_index;
  for (size_t i = 0; i < r.clauses.size(); ++i) clause_index[r.clauses[i].name] = i;
  ProofP body = replay_input_trace(r, [&](const TraceNode& leaf) {
    auto it = clause_index.find(leaf.pattern);
    if (it == clause_index.end()) invariant("input leaf covered by unknown clause " + leaf.pattern);
    ProofP cp = translate_clause(r, it->second, sig, supply);
    return instantiate_proof(cp, leaf.witness.map(), leaf.goal.ctx, sig, supply);
  });
  return initial_step(r.mf, r.order, body);
}

}  // namespace lfm2
