#pragma once

#include <random>
#include <string>

#include "lfm2/driver.h"
#include "lfm2/lp.h"
#include "lfm2/m2io.h"
#include "lfm2/proofgen.h"

namespace lfm2::test {

std::string fixture_path(const std::string& name);
SourceFile load_fixture(const std::string& name);
SourceFile parse_text(const std::string& text);

// Canonical term text, with `vars` naming free variables in scope.
TermP term(const Signature& sig, const std::string& text, const std::set<std::string>& vars = {});
TermP term(const SourceFile& src, const std::string& text, const std::set<std::string>& vars = {});
Context context(const Signature& sig, const std::string& text);

// A checked family with its certificate proof, built with one name supply.
struct Pipeline {
  SourceFile src;
  NameSupply supply;
  std::vector<TotalityResult> results;
  std::vector<ProofP> proofs;
};
Pipeline run_pipeline(const std::string& fixture);
ModedFamily moded_family(const SourceFile& src, const std::string& family);

// Independent oracles.

// Structural equality ignoring binder hints and lambda annotations.
bool struct_eq(const TermP& a, const TermP& b);
// Rule-by-rule LF checker over canonical terms with its own substitution.
bool naive_check(const Signature& sig, const Context& ctx, const TermP& m, const TermP& a);
// Instantiates the outermost bound variable of `body`, reducing redexes.
TermP naive_instantiate(const TermP& body, const TermP& value);
// Applies a canonical function to arguments, reducing.
TermP naive_apply(TermP f, const std::vector<TermP>& args);

// All canonical objects of `type` whose head nesting depth is at most `depth`;
// lambdas do not count towards the depth.
std::vector<TermP> enumerate_objects(const Signature& sig, const Context& ctx, const TermP& type, int depth);
// All closed instantiations of a context, each type up to `depth`.
std::vector<SubstMap> enumerate_instances(const Signature& sig, const Context& ctx, int depth);

// Higher-order pattern matching of `pattern` against a closed `target`;
// pattern variables may be applied to distinct bound variables.
bool naive_match(const TermP& pattern, const TermP& target, const std::set<std::string>& pattern_vars, SubstMap& out);
bool naive_match_all(const std::vector<TermP>& patterns, const std::vector<TermP>& targets,
                     const std::set<std::string>& pattern_vars, SubstMap& out);

// Closed call-by-name evaluation over the eval fixture's constants: the value
// and the derivation, or nothing when evaluation gets stuck or runs out of fuel.
struct Evaluation {
  TermP value;
  TermP derivation;
};
std::optional<Evaluation> reference_eval(const TermP& e, int fuel = 64);

// Pre-order visit of a splitting trace.
void walk_trace(const TraceP& t, const std::function<void(const TraceNode&)>& f);

// Nesting depth of constant heads (lambdas are free).
int term_depth(const TermP& t);

// Random closed simply typed object term of type `ty` (a `ty` object of the
// subred signature) with lambda nesting and size bounded by `depth`.
TermP random_typed_tm(const Signature& sig, const TermP& ty, int depth, std::mt19937& rng);
TermP random_simple_type(const Signature& sig, int depth, std::mt19937& rng);

// Pick uniformly.
template <class T>
const T& pick(const std::vector<T>& v, std::mt19937& rng) {
  std::uniform_int_distribution<size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

}  // namespace lfm2::test
