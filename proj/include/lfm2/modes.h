#pragma once

#include "lfm2/lf.h"

namespace lfm2 {

// Failure of one of the totality checks (including mode elaboration).
struct TotalityError : std::runtime_error {
  std::string kind;
  TotalityError(std::string k, const std::string& msg) : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
};

struct FamilyParam {
  std::string name;
  TermP type;  // over the names of earlier parameters
  bool implicit = false;
  bool input = false;
};

// A type family with a polarity per parameter. Parameters keep the declared
// order (so `a M1 .. Mn` applications are unchanged); the input and output
// lists give the dependency-respecting regrouping into inputs then outputs.
struct ModedFamily {
  std::string family;
  std::vector<FamilyParam> params;
  std::vector<int> input_order;
  std::vector<int> output_order;
  TermP elaborated_kind;

  int param_index(const std::string& name) const;
  Context inputs() const;
  Context outputs() const;
  // The family applied to its parameters, each replaced by `values` when bound.
  TermP apply(const SubstMap& values) const;
};

struct ModeLabel {
  bool input = false;
  std::string name;
};

// Extends explicit polarities to the implicit parameters: an implicit
// parameter is an input iff it occurs (transitively) in an input's classifier.
// Throws TotalityError "IllDefinedMode".
ModedFamily elaborate_mode(const std::string& family, const Signature& sig, const std::vector<ModeLabel>& explicit_modes);

}  // namespace lfm2
