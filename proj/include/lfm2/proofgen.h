#pragma once

#include <functional>

#include "lfm2/m2.h"
#include "lfm2/totality.h"

namespace lfm2 {

// Name of the recursion assumption in generated proofs.
inline const char* kInductionHypothesis = "IH";

struct ProofGenError : std::runtime_error {
  std::string kind;
  ProofGenError(std::string k, const std::string& msg) : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

// The family's termination order restated over the formula's universal variables.
TerminationOrder order_over_inputs(const ModedFamily& mf, const TerminationOrder& order);

// Rec(IH, F, AllIntro(inputs, body)).
ProofP initial_step(const ModedFamily& mf, const TerminationOrder& order, ProofP body);
// The frontier sequent right after the initial step.
Sequent initial_sequent(const ModedFamily& mf);

// Input goal and sequent correspond: same context, and the goal formula is
// the existential part of the meta-theorem at the goal's inputs.
bool rsc_holds(const CoverageGoal& g, const Sequent& s, const ModedFamily& mf);
// Output goal and sequent correspond: the sequent's context is the goal's
// context followed by one proof variable of type `a inputs outputs`.
bool roc_holds(const CoverageGoal& g, const Sequent& s, const ModedFamily& mf);

// The sequent a clause's proof is built for: the head's input variables,
// the hypothesis, and the meta-theorem at the head's inputs.
Sequent clause_sequent(const TotalityResult& r, size_t clause);

// Proof of the clause sequent from the clause's output traces.
ProofP translate_clause(const TotalityResult& r, size_t clause, const Signature& sig, NameSupply& supply);

// Rebuilds a clause proof for the sequent obtained by substituting `sigma`
// (total on the proof's context) into it, in the context `target`. Throws
// ProofGenError "InstantiationBroken".
ProofP instantiate_proof(const ProofP& p, const SubstMap& sigma, const Context& target, const Signature& sig,
                         NameSupply& supply);

// Case analyses following the input trace; covered leaves are filled by `leaf`.
ProofP replay_input_trace(const TotalityResult& r, const std::function<ProofP(const TraceNode&)>& leaf);

// The full certificate proof for a checked family.
ProofP generate(const TotalityResult& r, const Signature& sig, NameSupply& supply);

}  // namespace lfm2
