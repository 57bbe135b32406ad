#pragma once

#include "lfm2/term.h"

namespace lfm2 {

// Termination order over argument positions. Positions index the parameter
// list the order is applied to (family parameters in the totality checker,
// universally quantified variables in the proof checker).
struct TerminationOrder {
  enum class Kind : unsigned char { Subterm, Lex, Simul };
  Kind kind = Kind::Subterm;
  int position = 0;  // Subterm
  std::vector<TerminationOrder> parts;  // Lex / Simul

  static TerminationOrder arg(int pos);
  static TerminationOrder lex(std::vector<TerminationOrder> parts);
  static TerminationOrder simul(std::vector<TerminationOrder> parts);
  std::vector<int> positions() const;
};

// m is a strict subterm of n: descends through constant spines and under
// binders; the bound variable of a binder is opened with its own name.
bool subterm_less(const TermP& m, const TermP& n);

bool order_less(const TerminationOrder& o, const std::vector<TermP>& small, const std::vector<TermP>& big);
bool order_equal(const TerminationOrder& o, const std::vector<TermP>& small, const std::vector<TermP>& big);

}  // namespace lfm2
