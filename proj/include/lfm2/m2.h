#pragma once

#include "lfm2/modes.h"
#include "lfm2/order.h"
#include "lfm2/unify.h"

namespace lfm2 {

// forall all. exists ex. true
struct Formula {
  Context all;
  Context ex;
};

struct ProofTerm;
using ProofP = std::shared_ptr<const ProofTerm>;

// One case of a case analysis: the pattern (result context, rest context,
// instance of the scrutinee) and the proof under it.
struct CaseBranch {
  Context result;
  Context rest;
  TermP instance;
  ProofP body;
};

struct ProofTerm {
  enum class Kind : unsigned char { Rec, All, Let, Split, Witness, Case };
  Kind kind = Kind::Witness;
  std::string name;    // Rec: assumption; Let: new assumption; Split: assumption; Case: scrutinee
  std::string target;  // Let: the assumption instantiated
  Formula formula;     // Rec
  TerminationOrder order;  // Rec: positions into formula.all
  Context ctx;         // All, Split
  Subst subst;         // Let, Witness
  std::vector<CaseBranch> cases;
  ProofP body;
};

ProofP mk_rec(std::string name, Formula f, TerminationOrder order, ProofP body);
ProofP mk_all(Context ctx, ProofP body);
ProofP mk_let(std::string name, std::string target, Subst s, ProofP body);
ProofP mk_split(std::string name, Context ctx, ProofP body);
ProofP mk_witness(Subst s);
ProofP mk_case(std::string var, std::vector<CaseBranch> cases);

struct Assumption {
  std::string name;
  Formula formula;
};

struct Sequent {
  Context ctx;
  std::vector<Assumption> delta;
  Formula goal;
};

struct M2Error : std::runtime_error {
  std::string kind;
  M2Error(std::string k, const std::string& msg) : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

// forall inputs. exists outputs, D : a inputs outputs. true
Formula family_to_formula(const ModedFamily& mf);

// Positional alpha-equivalence of contexts and formulas.
bool context_alpha_eq(const Context& a, const Context& b);
bool formula_alpha_eq(const Formula& a, const Formula& b);
// Substitution into the free variables of a formula; binders that would
// capture a free variable of the substitution are renamed.
Formula subst_formula(const Formula& f, const SubstMap& s);
// The existential part after binding the universal variables to `s`.
Context instantiate_ex(const Formula& f, const SubstMap& s);

// Throws M2Error (or LfError from typing) unless the proof derives the sequent.
void check_proof(const Sequent& s, const ProofP& p, const Signature& sig);
// The body of `Rec(rec_var, f, body)` with the given order: false iff some
// recursive Let is not smaller.
bool proofterm_terminates(const ProofP& body, const std::string& rec_var, const Formula& f, const TerminationOrder& order,
                          const Signature& sig);

// Runs a checked Rec proof on closed inputs (keyed by the formula's universal
// variables); returns the existential witnesses. Throws M2Error
// "FuelExhausted" or "NoCaseMatches".
Subst execute(const ProofP& rec, const Subst& inputs, const Signature& sig, unsigned long fuel = 1000000);

}  // namespace lfm2
