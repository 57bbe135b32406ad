#include "lfm2/totality.h"

#include <algorithm>
#include <functional>
#include <sstream>

#include "lfm2/syntax.h"

namespace lfm2 {

namespace {

[[noreturn]] void fail(const std::string& kind, const std::string& msg) { throw TotalityError(kind, msg); }

void scan_suffixes(const TermP& t, unsigned long& top) {
  if (!t) return;
  switch (t->node) {
    case Node::Type:
      return;
    case Node::Pi:
    case Node::Lam:
      top = std::max(top, name_suffix(t->hint));
      scan_suffixes(t->dom, top);
      scan_suffixes(t->body, top);
      return;
    case Node::App:
      if (t->head.kind == HeadKind::Const || t->head.kind == HeadKind::Free) top = std::max(top, name_suffix(t->head.name));
      if (t->head.kind == HeadKind::Redex) scan_suffixes(t->head.term, top);
      for (auto& a : t->args) scan_suffixes(a, top);
      return;
  }
}

std::vector<TermP> pick(const std::vector<int>& order, const std::vector<TermP>& args) {
  std::vector<TermP> out;
  for (int i : order) out.push_back(args.at(static_cast<size_t>(i)));
  return out;
}

std::vector<std::string> free_vars_of(const std::vector<TermP>& ts) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& t : ts) collect_free_vars(t, out, seen);
  return out;
}

bool strict_in_any(const std::vector<TermP>& ts, const std::string& v) {
  for (auto& t : ts)
    if (strict_occurrence_exists(t, v)) return true;
  return false;
}

const std::vector<TermP>& atomic_args(const TermP& a, const ModedFamily& mf, const std::string& where) {
  if (a->node != Node::App || a->head.kind != HeadKind::Const)
    fail("ModeError", where + " is not an atomic proposition");
  if (a->head.name != mf.family)
    fail("ModeError", where + " calls '" + a->head.name + "', a family other than '" + mf.family + "'");
  if (a->args.size() != mf.params.size()) fail("ModeError", where + " has the wrong number of arguments");
  return a->args;
}

std::string premise_label(const Clause& cl, size_t i) { return "clause " + cl.name + " premise " + std::to_string(i + 1); }

Context sub_context(const Context& ctx, const std::vector<std::string>& names) {
  std::set<std::string> keep(names.begin(), names.end());
  Context out;
  for (auto& e : ctx.entries)
    if (keep.count(e.name)) out.entries.push_back(e);
  return out;
}

struct Renamed {
  Context vars;
  SubstMap map;  // original name -> temp-named variable
  std::vector<std::string> temps;
};

Renamed rename_apart(const Context& vars) {
  Renamed r;
  for (auto& e : vars.entries) {
    std::string t = temp_name();
    TermP ty = hsubst(e.type, r.map);
    r.map[e.name] = eta_var(t, ty);
    r.vars.push(t, ty);
    r.temps.push_back(t);
  }
  return r;
}

bool has_dependents(const Context& ctx, const std::string& v) {
  for (auto& e : ctx.entries)
    if (e.name != v && occurs_free(e.type, v)) return true;
  return false;
}

struct Candidates {
  bool unifies = false;
  std::vector<std::string> vars;  // context order, preferred first
};

// Goal variables that some unifying pattern instantiates with a non-variable.
Candidates split_candidates(const CoverageGoal& g, const std::vector<CoveragePattern>& pats, const Signature& sig,
                            NameSupply& supply) {
  Candidates out;
  std::set<std::string> found;
  std::vector<TermP> subj = g.subjects();
  for (auto& pat : pats) {
    Renamed r = rename_apart(pat.vars);
    UnifProblem p;
    for (auto& e : g.ctx.entries)
      if (!g.is_frozen(e.name)) {
        p.ctx.entries.push_back(e);
        p.flex.push_back(e.name);
      }
    for (auto& e : r.vars.entries) {
      p.ctx.entries.push_back(e);
      p.flex.push_back(e.name);
    }
    for (size_t i = 0; i < pat.subjects.size() && i < subj.size(); ++i) p.add(hsubst(pat.subjects[i], r.map), subj[i]);
    UnifOutcome u = unify(p, sig, supply);
    if (u.kind == UnifOutcome::Kind::NoSolution) continue;
    out.unifies = true;
    if (!u.ok()) continue;
    for (auto& b : u.subst.binds)
      if (g.ctx.contains(b.var) && !as_eta_var(b.term)) found.insert(b.var);
  }
  std::vector<std::string> late;
  for (auto& e : g.ctx.entries) {
    if (!found.count(e.name)) continue;
    (has_dependents(g.ctx, e.name) ? late : out.vars).push_back(e.name);
  }
  out.vars.insert(out.vars.end(), late.begin(), late.end());
  return out;
}

TraceP explore(const CoverageGoal& g, const std::vector<CoveragePattern>& pats, const Signature& sig,
               NameSupply& supply, int& budget) {
  auto node = std::make_shared<TraceNode>();
  node->goal = g;
  if (auto cov = immediately_covered(g, pats, sig, supply)) {
    node->kind = TraceNode::Kind::Covered;
    node->pattern = cov->pattern;
    node->witness = cov->witness;
    return node;
  }
  bool input = g.kind == CoverageGoal::Kind::Input;
  node->kind = TraceNode::Kind::Failed;
  node->error = input ? "CoverageFailure" : "OutputCoverageFailure";
  Candidates cands = split_candidates(g, pats, sig, supply);
  if (!cands.unifies) {
    node->reason = "no pattern unifies with the goal";
    return node;
  }
  std::vector<std::string> notes;
  bool tried = false;
  bool only_undecided = true;
  for (auto& x : cands.vars) {
    if ((*g.ctx.lookup(x))->node == Node::Pi) {
      notes.push_back(x + " has a function type");
      only_undecided = false;
      continue;
    }
    std::vector<CaseSplit> children;
    try {
      tried = true;
      children = split_goal(g, x, sig, supply);
    } catch (const TotalityError& e) {
      notes.push_back(e.what());
      if (e.kind != "SplitUndecided") only_undecided = false;
      continue;
    }
    if (--budget < 0) {
      node->reason = "split budget exhausted";
      return node;
    }
    node->kind = TraceNode::Kind::Split;
    node->var = x;
    for (auto& cs : children) node->children.push_back({cs, explore(child_goal(g, cs), pats, sig, supply, budget)});
    return node;
  }
  if (input && tried && only_undecided) node->error = "SplitUndecided";
  if (notes.empty()) {
    node->reason = "no variable can be split";
  } else {
    node->reason = notes.front();
    for (size_t i = 1; i < notes.size(); ++i) node->reason += "; " + notes[i];
  }
  return node;
}

}  // namespace

std::vector<TermP> CoverageGoal::subjects() const {
  std::vector<TermP> out = inputs;
  out.insert(out.end(), outputs.begin(), outputs.end());
  return out;
}

bool CoverageGoal::is_frozen(const std::string& v) const {
  return std::find(frozen.begin(), frozen.end(), v) != frozen.end();
}

NameSupply seeded_supply(const Signature& sig) {
  unsigned long top = 0;
  for (auto& d : sig.decls) {
    top = std::max(top, name_suffix(d.name));
    scan_suffixes(d.type, top);
  }
  NameSupply s;
  s.next = top + 1;
  return s;
}

std::vector<TermP> input_args(const ModedFamily& mf, const std::vector<TermP>& args) { return pick(mf.input_order, args); }

std::vector<TermP> output_args(const ModedFamily& mf, const std::vector<TermP>& args) { return pick(mf.output_order, args); }

SubstMap param_values(const ModedFamily& mf, const std::vector<TermP>& args) {
  SubstMap m;
  for (size_t i = 0; i < mf.params.size() && i < args.size(); ++i) m[mf.params[i].name] = args[i];
  return m;
}

void check_mode_consistency(const Clause& cl, const ModedFamily& mf) {
  const auto& head = atomic_args(cl.head, mf, "clause " + cl.name + " head");
  std::vector<TermP> head_in = input_args(mf, head);
  std::set<std::string> ground;
  for (auto& v : free_vars_of(head_in))
    if (strict_in_any(head_in, v)) ground.insert(v);
  for (size_t i = 0; i < cl.premises.size(); ++i) {
    std::string where = premise_label(cl, i);
    const auto& args = atomic_args(cl.premises[i], mf, where);
    for (auto& v : free_vars_of(input_args(mf, args)))
      if (!ground.count(v)) fail("ModeError", where + ": input argument mentions " + v + ", which is not ground");
    std::vector<TermP> outs = output_args(mf, args);
    for (auto& v : free_vars_of(outs))
      if (strict_in_any(outs, v)) ground.insert(v);
  }
  for (auto& v : free_vars_of(output_args(mf, head)))
    if (!ground.count(v)) fail("ModeError", "clause " + cl.name + ": output argument mentions " + v + ", which is not ground");
}

void check_termination(const ModedFamily& mf, const std::vector<Clause>& clauses, const TerminationOrder& order) {
  for (auto& cl : clauses) {
    const auto& head = atomic_args(cl.head, mf, "clause " + cl.name + " head");
    for (size_t i = 0; i < cl.premises.size(); ++i) {
      const auto& args = atomic_args(cl.premises[i], mf, premise_label(cl, i));
      if (order_less(order, args, head)) continue;
      std::string detail;
      for (int p : order.positions()) {
        auto k = static_cast<size_t>(p);
        detail += " " + mf.params[k].name + ": " + show(args[k]) + " in the premise, " + show(head[k]) + " in the head;";
      }
      if (!detail.empty()) detail.pop_back();
      fail("TerminationError", premise_label(cl, i) + ": arguments are not smaller:" + detail);
    }
  }
}

InputCoverageProblem input_goal_and_patterns(const ModedFamily& mf, const std::vector<Clause>& clauses) {
  InputCoverageProblem out;
  out.goal.kind = CoverageGoal::Kind::Input;
  out.goal.ctx = mf.inputs();
  for (auto& e : out.goal.ctx.entries) out.goal.inputs.push_back(eta_var(e.name, e.type));
  for (auto& cl : clauses) {
    CoveragePattern p;
    p.id = cl.name;
    p.subjects = input_args(mf, atomic_args(cl.head, mf, "clause " + cl.name + " head"));
    p.vars = sub_context(cl.vars, dependency_closure(cl.vars, free_vars_of(p.subjects)));
    out.patterns.push_back(std::move(p));
  }
  return out;
}

std::vector<CaseSplit> split_goal(const CoverageGoal& g, const std::string& x, const Signature& sig, NameSupply& supply) {
  const TermP* ax = g.ctx.lookup(x);
  if (!ax) fail("SplitUndecided", x + " is not a goal variable");
  if ((*ax)->node == Node::Pi) fail("FunctionTypeSplit", x + " : " + show(*ax) + " has a function type");
  if ((*ax)->node != Node::App || (*ax)->head.kind != HeadKind::Const)
    fail("FunctionTypeSplit", x + " : " + show(*ax) + " is not atomic");
  bool output = g.kind == CoverageGoal::Kind::Output;
  if (output && g.is_frozen(x)) fail("NotMatchable", x + " belongs to the clause prefix");
  CasePermutation perm = case_permutation(g.ctx, x);
  std::vector<CaseSplit> out;
  for (const Decl* c : constructors_of(sig, (*ax)->head.name)) {
    CaseSplit cs = split_on(perm, *c, sig, supply);
    if (cs.kind == CaseSplit::Kind::NoSolution) continue;
    if (cs.kind == CaseSplit::Kind::OutsideFragment)
      fail("SplitUndecided", "splitting " + x + " on " + c->name + ": " + cs.reason);
    if (output && cs.moved_prefix)
      fail("NotMatchable", x + " : " + show(*ax) + " is not an instance of the type of " + c->name);
    out.push_back(std::move(cs));
  }
  return out;
}

CoverageGoal child_goal(const CoverageGoal& g, const CaseSplit& split) {
  CoverageGoal c;
  c.kind = g.kind;
  c.frozen = g.frozen;
  c.ctx = concat(split.result, split.rest);
  for (auto& t : g.inputs) c.inputs.push_back(apply_subst(t, split.mgu));
  for (auto& t : g.outputs) c.outputs.push_back(apply_subst(t, split.mgu));
  return c;
}

std::optional<Coverage> immediately_covered(const CoverageGoal& g, const std::vector<CoveragePattern>& pats,
                                            const Signature& sig, NameSupply& supply) {
  std::vector<TermP> subj = g.subjects();
  for (auto& pat : pats) {
    if (pat.subjects.size() != subj.size()) continue;
    Renamed r = rename_apart(pat.vars);
    UnifProblem p;
    p.ctx = r.vars;
    p.flex = r.temps;
    for (size_t i = 0; i < subj.size(); ++i) p.add(hsubst(pat.subjects[i], r.map), subj[i]);
    UnifOutcome u = unify(p, sig, supply);
    if (!u.ok()) continue;
    Subst w;
    bool complete = true;
    for (size_t i = 0; i < pat.vars.size(); ++i) {
      const TermP* v = u.subst.lookup(r.temps[i]);
      if (!v) {
        complete = false;
        break;
      }
      w.binds.push_back({pat.vars.entries[i].name, *v});
    }
    if (!complete) continue;
    if (g.kind == CoverageGoal::Kind::Output) {
      auto ren = as_renaming(w);
      if (!ren) continue;
      std::set<std::string> image;
      for (auto& [from, to] : *ren) image.insert(to);
      std::set<std::string> open_vars;
      for (auto& e : g.ctx.entries)
        if (!g.is_frozen(e.name)) open_vars.insert(e.name);
      if (image != open_vars) continue;
    }
    try {
      check_subst_typing(g.ctx, sig, w, pat.vars);
    } catch (const LfError&) {
      continue;
    }
    return Coverage{pat.id, w};
  }
  return std::nullopt;
}

TraceP explore_coverage(const CoverageGoal& g, const std::vector<CoveragePattern>& pats, const Signature& sig,
                        NameSupply& supply, int budget) {
  return explore(g, pats, sig, supply, budget);
}

const TraceNode* first_failure(const TraceP& t) {
  if (t->kind == TraceNode::Kind::Failed) return t.get();
  for (auto& c : t->children)
    if (auto f = first_failure(c.node)) return f;
  return nullptr;
}

std::vector<const TraceNode*> trace_leaves(const TraceP& t) {
  std::vector<const TraceNode*> out;
  std::function<void(const TraceP&)> go = [&](const TraceP& n) {
    if (n->kind != TraceNode::Kind::Split) {
      out.push_back(n.get());
      return;
    }
    for (auto& c : n->children) go(c.node);
  };
  go(t);
  return out;
}

std::string show_goal(const CoverageGoal& g, const std::string& family) {
  std::string s = print_context(g.ctx) + (g.ctx.empty() ? "|- " : " |- ") + family;
  for (auto& t : g.subjects()) {
    bool atomic = t->node == Node::App && t->args.empty();
    s += " " + (atomic ? show(t) : "(" + show(t) + ")");
  }
  return s;
}

TraceP check_input_coverage(const ModedFamily& mf, const std::vector<Clause>& clauses, const Signature& sig,
                            NameSupply& supply, int budget) {
  InputCoverageProblem prob = input_goal_and_patterns(mf, clauses);
  TraceP t = explore_coverage(prob.goal, prob.patterns, sig, supply, budget);
  if (auto f = first_failure(t))
    fail(f->error, "family " + mf.family + ": goal " + show_goal(f->goal, mf.family) + " is not covered (" + f->reason + ")");
  return t;
}

ClauseScaffold clause_scaffold(const Clause& cl, const ModedFamily& mf) {
  ClauseScaffold sc;
  sc.clause = cl;
  sc.head_args = atomic_args(cl.head, mf, "clause " + cl.name + " head");
  sc.premise_names.resize(cl.premises.size());
  for (auto& b : cl.binders)
    if (b.premise >= 0) sc.premise_names[static_cast<size_t>(b.premise)] = b.name;
  Context cur = sub_context(cl.vars, dependency_closure(cl.vars, free_vars_of(input_args(mf, sc.head_args))));
  sc.contexts.push_back(cur);
  for (size_t i = 0; i < cl.premises.size(); ++i) {
    sc.premise_args.push_back(atomic_args(cl.premises[i], mf, premise_label(cl, i)));
    std::vector<std::string> outs;
    for (auto& v : free_vars_of(output_args(mf, sc.premise_args.back())))
      if (!cur.contains(v)) outs.push_back(v);
    Context fresh;
    for (auto& v : dependency_closure(cl.vars, outs))
      if (!cur.contains(v)) fresh.push(v, *cl.vars.lookup(v));
    sc.new_outputs.push_back(fresh);
    cur = concat(cur, fresh);
    cur.push(sc.premise_names[i], cl.premises[i]);
    sc.contexts.push_back(cur);
  }
  return sc;
}

void check_output_freshness(const Clause& cl, const ModedFamily& mf) {
  ClauseScaffold sc = clause_scaffold(cl, mf);
  for (size_t i = 0; i < cl.premises.size(); ++i) {
    const auto& args = sc.premise_args[i];
    // Variables fixed by the inputs through the output classifiers are not outputs.
    SubstMap inst;
    for (int k : mf.input_order) inst[mf.params[static_cast<size_t>(k)].name] = args[static_cast<size_t>(k)];
    std::set<std::string> exempt;
    for (int k : mf.output_order)
      for (auto& v : free_vars(hsubst(mf.params[static_cast<size_t>(k)].type, inst))) exempt.insert(v);
    std::vector<std::string> in_vars = free_vars_of(input_args(mf, args));
    std::set<std::string> in_set(in_vars.begin(), in_vars.end());
    const Context& before = sc.contexts[i];
    for (auto& v : free_vars_of(output_args(mf, args))) {
      if (exempt.count(v)) continue;
      if (in_set.count(v)) fail("FreshnessError", premise_label(cl, i) + ": output variable " + v + " also occurs in an input");
      if (before.contains(v))
        fail("FreshnessError", premise_label(cl, i) + ": output variable " + v + " is already bound by an earlier premise or the head");
    }
  }
}

OutputCoverageProblem output_goal_and_pattern(const ClauseScaffold& sc, size_t premise, const ModedFamily& mf,
                                              NameSupply& supply) {
  OutputCoverageProblem out;
  const auto& args = sc.premise_args.at(premise);
  CoverageGoal& g = out.goal;
  g.kind = CoverageGoal::Kind::Output;
  g.ctx = sc.contexts.at(premise);
  g.frozen = g.ctx.names();
  g.inputs = input_args(mf, args);
  SubstMap inst;
  for (int k : mf.input_order) inst[mf.params[static_cast<size_t>(k)].name] = args[static_cast<size_t>(k)];
  for (int k : mf.output_order) {
    const FamilyParam& p = mf.params[static_cast<size_t>(k)];
    std::string n = supply.fresh(p.name);
    TermP ty = hsubst(p.type, inst);
    g.ctx.push(n, ty);
    TermP v = eta_var(n, ty);
    inst[p.name] = v;
    g.outputs.push_back(v);
  }
  out.pattern.id = sc.clause.name;
  out.pattern.vars = sc.new_outputs.at(premise);
  out.pattern.subjects = g.inputs;
  for (auto& t : output_args(mf, args)) out.pattern.subjects.push_back(t);
  return out;
}

TraceP check_output_coverage(const ClauseScaffold& sc, size_t premise, const ModedFamily& mf, const Signature& sig,
                             NameSupply& supply, int budget) {
  OutputCoverageProblem prob = output_goal_and_pattern(sc, premise, mf, supply);
  TraceP t = explore_coverage(prob.goal, {prob.pattern}, sig, supply, budget);
  if (auto f = first_failure(t))
    fail("OutputCoverageFailure", premise_label(sc.clause, premise) + ": goal " + show_goal(f->goal, mf.family) +
                                      " is not covered by the premise (" + f->reason + ")");
  return t;
}

std::vector<Clause> family_clauses(const Signature& sig, const ModedFamily& mf) {
  std::set<std::string> avoid{"D", "D'", "D''", "IH"};
  for (auto& p : mf.params) avoid.insert(p.name);
  std::vector<Clause> out;
  for (auto& d : sig.decls)
    if (d.kind == DeclKind::Object && family_head(d.type) == mf.family) out.push_back(decompose_clause(d.name, d.type, avoid));
  return out;
}

TotalityResult check_totality(const ModedFamily& mf, const TerminationOrder& order, const Signature& sig,
                              NameSupply& supply, int budget) {
  TotalityResult r;
  r.mf = mf;
  r.order = order;
  r.clauses = family_clauses(sig, mf);
  for (auto& cl : r.clauses) check_mode_consistency(cl, mf);
  check_termination(mf, r.clauses, order);
  r.input_trace = check_input_coverage(mf, r.clauses, sig, supply, budget);
  for (auto& cl : r.clauses) {
    check_output_freshness(cl, mf);
    ClauseResult cr;
    cr.scaffold = clause_scaffold(cl, mf);
    for (auto& c : cr.scaffold.contexts) check_context(sig, c);
    for (size_t i = 0; i < cl.premises.size(); ++i)
      cr.output_traces.push_back(check_output_coverage(cr.scaffold, i, mf, sig, supply, budget));
    r.clause_results.push_back(std::move(cr));
  }
  return r;
}

}  // namespace lfm2
