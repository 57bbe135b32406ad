#pragma once

#include "lfm2/elab.h"
#include "lfm2/m2.h"

namespace lfm2 {

struct Theorem {
  std::string family;
  ProofP proof;  // a Rec whose order names the formula's universal variables
};

struct Certificate {
  std::vector<Theorem> theorems;
};

std::string print_proof(const ProofP& p, int indent = 0);
// The order over the universal variables: `x`, `{x y}` (lexicographic), `[x y]` (simultaneous).
std::string print_rec_order(const TerminationOrder& o, const Context& all);
std::string print_certificate(const Certificate& c);
// Throws M2Error "VersionMismatch" or "MalformedCertificate".
Certificate read_certificate(const std::string& text, const Signature& sig);

// Every %total of the source needs a theorem for its family whose formula is
// the family's meta-theorem and whose proof checks. Throws M2Error.
void verify_certificate(const SourceFile& src, const Certificate& cert);

}  // namespace lfm2
