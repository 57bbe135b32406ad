#pragma once

#include "lfm2/lp.h"
#include "lfm2/modes.h"
#include "lfm2/order.h"
#include "lfm2/unify.h"

namespace lfm2 {

// A coverage goal or pattern `ctx |- a inputs outputs`. Input goals carry no
// outputs (their classifier abstracts over the output parameters).
struct CoverageGoal {
  enum class Kind : unsigned char { Input, Output };
  Kind kind = Kind::Input;
  Context ctx;
  std::vector<std::string> frozen;  // output goals: the clause prefix, never split or instantiated
  std::vector<TermP> inputs;
  std::vector<TermP> outputs;
  std::vector<TermP> subjects() const;
  bool is_frozen(const std::string& v) const;
};

struct CoveragePattern {
  std::string id;  // clause name
  Context vars;    // pattern variables (output patterns: new output variables only)
  std::vector<TermP> subjects;
};

struct TraceNode;
using TraceP = std::shared_ptr<const TraceNode>;

struct TraceChild {
  CaseSplit split;
  TraceP node;
};

struct TraceNode {
  enum class Kind : unsigned char { Split, Covered, Failed };
  Kind kind = Kind::Failed;
  CoverageGoal goal;
  std::string var;                  // Split
  std::vector<TraceChild> children; // Split: one per unifiable constant, signature order
  std::string pattern;              // Covered
  Subst witness;                    // Covered: pattern variables to goal terms
  std::string error;                // Failed: error kind
  std::string reason;               // Failed
};

// Fresh-name counter above every `#n` suffix used in the signature.
NameSupply seeded_supply(const Signature& sig);

std::vector<TermP> input_args(const ModedFamily& mf, const std::vector<TermP>& args);
std::vector<TermP> output_args(const ModedFamily& mf, const std::vector<TermP>& args);
// Family parameters bound to `args` (declared order).
SubstMap param_values(const ModedFamily& mf, const std::vector<TermP>& args);

void check_mode_consistency(const Clause& cl, const ModedFamily& mf);
void check_termination(const ModedFamily& mf, const std::vector<Clause>& clauses, const TerminationOrder& order);

struct InputCoverageProblem {
  CoverageGoal goal;
  std::vector<CoveragePattern> patterns;
};
InputCoverageProblem input_goal_and_patterns(const ModedFamily& mf, const std::vector<Clause>& clauses);

// Children of splitting `x`; throws FunctionTypeSplit, SplitUndecided and,
// for output goals, NotMatchable.
std::vector<CaseSplit> split_goal(const CoverageGoal& g, const std::string& x, const Signature& sig, NameSupply& supply);
CoverageGoal child_goal(const CoverageGoal& g, const CaseSplit& split);

struct Coverage {
  std::string pattern;
  Subst witness;
};
// Input goals: any matching substitution; output goals: a bijective renaming
// onto the goal's non-frozen variables.
std::optional<Coverage> immediately_covered(const CoverageGoal& g, const std::vector<CoveragePattern>& pats,
                                            const Signature& sig, NameSupply& supply);

// Splits until every leaf is covered or fails; failures are recorded as leaves.
TraceP explore_coverage(const CoverageGoal& g, const std::vector<CoveragePattern>& pats, const Signature& sig,
                        NameSupply& supply, int budget);
// First failed leaf, if any.
const TraceNode* first_failure(const TraceP& t);
std::vector<const TraceNode*> trace_leaves(const TraceP& t);

// Throws CoverageFailure or SplitUndecided.
TraceP check_input_coverage(const ModedFamily& mf, const std::vector<Clause>& clauses, const Signature& sig,
                            NameSupply& supply, int budget = 200);

// Clause contexts: ctx[0] is the dependency closure of the head's input
// variables; ctx[i] adds the output variables first bound by premise i, then
// the premise's proof variable.
struct ClauseScaffold {
  Clause clause;
  std::vector<TermP> head_args;
  std::vector<std::vector<TermP>> premise_args;
  std::vector<std::string> premise_names;
  std::vector<Context> new_outputs;
  std::vector<Context> contexts;
};
ClauseScaffold clause_scaffold(const Clause& cl, const ModedFamily& mf);

void check_output_freshness(const Clause& cl, const ModedFamily& mf);

struct OutputCoverageProblem {
  CoverageGoal goal;
  CoveragePattern pattern;
};
// Premise index is 0-based.
OutputCoverageProblem output_goal_and_pattern(const ClauseScaffold& sc, size_t premise, const ModedFamily& mf,
                                              NameSupply& supply);
// Throws OutputCoverageFailure.
TraceP check_output_coverage(const ClauseScaffold& sc, size_t premise, const ModedFamily& mf, const Signature& sig,
                             NameSupply& supply, int budget = 200);

struct ClauseResult {
  ClauseScaffold scaffold;
  std::vector<TraceP> output_traces;
};

struct TotalityResult {
  ModedFamily mf;
  TerminationOrder order;
  std::vector<Clause> clauses;
  TraceP input_trace;
  std::vector<ClauseResult> clause_results;  // parallel to clauses
};

// The family's clauses, with variable names distinct from the parameter names
// and the names the meta-theorem formula uses.
std::vector<Clause> family_clauses(const Signature& sig, const ModedFamily& mf);

// Mode consistency, termination, input coverage, then freshness and output
// coverage per clause. Throws TotalityError.
TotalityResult check_totality(const ModedFamily& mf, const TerminationOrder& order, const Signature& sig,
                              NameSupply& supply, int budget = 200);

// covtrace/1 text for a set of checked families.
std::string print_traces(const std::vector<const TotalityResult*>& results);
std::string print_trace_tree(const TraceP& t);
// Reads traces back, replaying every split against the signature; the
// results must already carry the families and clauses the traces refer to.
// Throws TotalityError "MalformedTrace" or "VersionMismatch".
void read_traces(const std::string& text, const Signature& sig, std::vector<TotalityResult*>& results, NameSupply& supply);

std::string show_goal(const CoverageGoal& g, const std::string& family);

}  // namespace lfm2
