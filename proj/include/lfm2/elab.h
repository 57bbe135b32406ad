#pragma once

#include "lfm2/modes.h"
#include "lfm2/order.h"
#include "lfm2/syntax.h"

namespace lfm2 {

// `%mode a +X -Y.` before mode elaboration.
struct ModeSpec {
  std::string family;
  std::vector<ModeLabel> params;
  int line = 0;
};

// Termination order over the labels of a `%total` call pattern.
struct OrderSpec {
  enum class Kind : unsigned char { Arg, Lex, Simul };
  Kind kind = Kind::Arg;
  std::string label;
  std::vector<OrderSpec> parts;
};

// `%total ORDER (a args).`; `_` arguments are unconstrained.
struct TotalSpec {
  std::string family;
  OrderSpec order;
  std::vector<std::string> call_args;
  int line = 0;
};

struct SourceFile {
  Signature sig;
  std::vector<ModeSpec> modes;
  std::vector<TotalSpec> totals;
};

// Parses a signature file and reconstructs implicit parameters of each
// declaration. Throws SyntaxError.
SourceFile parse_source(const std::string& text);

struct ElaboratedGoal {
  std::string proof_name;  // empty if the goal text has no `D :` prefix
  Context vars;
  TermP target;
};
// `D : A` or `A`, with uppercase free identifiers as logic variables.
ElaboratedGoal elaborate_goal(const std::string& text, const Signature& sig);

// The order as positions into the family's full parameter list.
TerminationOrder resolve_order(const TotalSpec& spec, const ModedFamily& mf);

// Prints a fully explicit source file that parses back to the same signature.
std::string print_signature(const Signature& sig);
std::string print_mode(const ModedFamily& mf);
std::string print_order(const TerminationOrder& o, const ModedFamily& mf);

}  // namespace lfm2
