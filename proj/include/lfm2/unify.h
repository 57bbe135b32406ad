#pragma once

#include "lfm2/lf.h"

namespace lfm2 {

struct Equation {
  TermP lhs;
  TermP rhs;
  // Parameters in scope for this equation (treated as bound variables: a
  // flexible variable may only depend on them through its arguments).
  std::vector<Entry> locals;
};

struct UnifProblem {
  std::vector<Equation> eqs;
  Context ctx;                     // classifiers of the unifiable variables
  std::vector<std::string> flex;   // unifiable variables in preference order
  // Reconstruction only: decompose `F M1..Mn = F N1..Nn` outside the pattern
  // fragment argument-wise. Sound but not most general.
  bool decompose_same_head = false;

  void add(TermP a, TermP b) { eqs.push_back({std::move(a), std::move(b), {}}); }
};

struct UnifOutcome {
  enum class Kind : unsigned char { Mgu, NoSolution, OutsideFragment };
  Kind kind = Kind::NoSolution;
  Subst subst;      // bindings of the problem's unifiable variables
  Context result;   // unifiable variables left after solving, plus new ones
  std::string reason;

  bool ok() const { return kind == Kind::Mgu; }
};

// Pattern-fragment unification. Among two unifiable variables, the one later
// in the preference order is bound; new variables created by pruning take the
// place of the variable they replace in the result context.
UnifOutcome unify(const UnifProblem& p, const Signature& sig, NameSupply& supply);

bool strict_occurrence_exists(const TermP& t, const std::string& v);
bool is_strict_term(const TermP& t, const std::vector<std::string>& vars);

// One-sided unification: only the pattern variables are unifiable.
UnifOutcome match(const TermP& pattern, const TermP& target, const Context& pattern_vars, const Signature& sig,
                  NameSupply& supply);
UnifOutcome match_all(const std::vector<TermP>& patterns, const std::vector<TermP>& targets,
                      const Context& pattern_vars, const Signature& sig, NameSupply& supply);

// If `s` only maps variables to pairwise distinct variables, the renaming.
std::optional<std::unordered_map<std::string, std::string>> as_renaming(const Subst& s);

// Case analysis on a variable x of a context: the context is permuted to
// prefix, x, rest where prefix is the dependency closure of x's classifier.
struct CasePermutation {
  Context prefix;
  Entry var;
  Context rest;
};
CasePermutation case_permutation(const Context& ctx, const std::string& x);

// One constant's case when splitting x: unify (A_x = A_c, x = c Gc) with the
// prefix, x and fresh copies Gc of the constant's parameters all unifiable.
struct CaseSplit {
  enum class Kind : unsigned char { Mgu, NoSolution, OutsideFragment };
  Kind kind = Kind::NoSolution;
  std::string constant;
  Subst mgu;          // bindings of prefix and x (values over `result`)
  Context result;     // unifiable variables left after solving
  Context rest;       // the rest of the context under the mgu
  TermP instance;     // x under the mgu
  bool moved_prefix = false;  // the mgu binds some prefix variable
  std::string reason;
};
CaseSplit split_on(const CasePermutation& perm, const Decl& constant, const Signature& sig, NameSupply& supply);

// Object constants whose target family is `family`, in signature order.
std::vector<const Decl*> constructors_of(const Signature& sig, const std::string& family);

// A renaming r of the variables in `vars` with from_i[r] = to_i, where the
// `to` side is rigid; variables not determined map to themselves. Fails unless
// the result is injective.
std::optional<std::unordered_map<std::string, std::string>> renaming_between(const std::vector<TermP>& from,
                                                                            const std::vector<TermP>& to,
                                                                            const Context& vars,
                                                                            const Signature& sig,
                                                                            NameSupply& supply);

}  // namespace lfm2
