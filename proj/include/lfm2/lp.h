#pragma once

#include <functional>

#include "lfm2/lf.h"

namespace lfm2 {

// One Pi binder of a clause's declared type: either a variable the rest of the
// type depends on, or a premise (a non-dependent argument).
struct ClauseBinder {
  std::string name;
  TermP type;
  int premise = -1;  // index into Clause::premises, or -1 for a variable
};

// c : {vars} A_m -> ... -> A_1 -> A, premises listed in solving order A_1 .. A_m.
struct Clause {
  std::string name;
  std::vector<ClauseBinder> binders;  // declared Pi order
  Context vars;
  TermP head;
  std::vector<TermP> premises;

  // c applied to its arguments: variable values by name, premise proofs by index.
  TermP apply(const SubstMap& values, const std::vector<TermP>& premise_proofs) const;
  // Identity application: variables as eta-expanded variables, premises as `names`.
  TermP apply_names(const std::vector<std::string>& premise_names) const;
};

// Decompose a declared type; binder names avoid `avoid` and each other.
Clause decompose_clause(const std::string& name, const TermP& type, const std::set<std::string>& avoid = {});
// Object constants whose target family is `family`, in signature order.
std::vector<Clause> clauses_for(const Signature& sig, const std::string& family);
// Family constant at the head of an atomic family, or empty.
std::string family_head(const TermP& a);

struct Goal {
  Context vars;  // logic variables of the target
  TermP target;
  unsigned long budget = 10000;  // backchaining attempts
};

struct Solution {
  TermP proof;
  Subst answer;    // bindings of the goal's logic variables
  Context residual;  // logic variables left unconstrained
};

struct LpError : std::runtime_error {
  std::string kind;
  LpError(std::string k, const std::string& msg) : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

// Depth-first backchaining. `on_solution` returns false to stop the search.
// Throws LpError "BudgetExhausted" or "OutsideFragment".
void solve(const Goal& goal, const Signature& sig, const std::function<bool(const Solution&)>& on_solution);
std::vector<Solution> solve_all(const Goal& goal, const Signature& sig, size_t limit);
std::optional<Solution> solve_first(const Goal& goal, const Signature& sig);

}  // namespace lfm2
