// One PASS/FAIL line per acceptance criterion.
#include <cstdio>
#include <functional>

#include "support/criteria.h"

using namespace lfm2::test;

int main() {
  struct Row {
    int id;
    const char* name;
    std::function<CriterionResult()> run;
  };
  const Row rows[] = {
      {1, "subred check, prove and verify end to end", [] { return end_to_end_subred(); }},
      {2, "subred certificate executed on 20 random closed input pairs", [] { return execute_subred_certificate(); }},
      {3, "negative fixtures fail the intended check", [] { return negative_suite(); }},
      {4, "splitting preserves coverage by brute force", [] { return splitting_preserves_coverage(); }},
      {5, "substitution composition and typing lemmas on 1000 triples", [] { return substitution_lemmas(); }},
      {6, "grid unifiers factor through the mgu on 500 problems", [] { return mgu_factoring(); }},
      {7, "instantiated clause proofs are accepted", [] { return instantiation_accepted(); }},
      {8, "subterm order under substitution and Rec termination", [] { return subterm_order_instantiation(); }},
      {9, "certificates are byte-identical across runs", [] { return certificate_stability(); }},
  };
  int failed = 0;
  for (auto& row : rows) {
    CriterionResult r = row.run();
    if (r.pass) {
      std::printf("PASS %d %s (%.2f s)\n", row.id, row.name, r.seconds);
    } else {
      ++failed;
      std::printf("FAIL %d %s (%.2f s): %s\n", row.id, row.name, r.seconds, r.detail.c_str());
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
