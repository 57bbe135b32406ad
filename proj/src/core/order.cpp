#include "lfm2/order.h"

namespace lfm2 {

TerminationOrder TerminationOrder::arg(int pos) {
  TerminationOrder o;
  o.kind = Kind::Subterm;
  o.position = pos;
  return o;
}

TerminationOrder TerminationOrder::lex(std::vector<TerminationOrder> parts) {
  TerminationOrder o;
  o.kind = Kind::Lex;
  o.parts = std::move(parts);
  return o;
}

TerminationOrder TerminationOrder::simul(std::vector<TerminationOrder> parts) {
  TerminationOrder o;
  o.kind = Kind::Simul;
  o.parts = std::move(parts);
  return o;
}

std::vector<int> TerminationOrder::positions() const {
  if (kind == Kind::Subterm) return {position};
  std::vector<int> out;
  for (auto& p : parts)
    for (int i : p.positions()) out.push_back(i);
  return out;
}

namespace {

bool sub_or_eq(const TermP& m, const TermP& n) { return alpha_eq(m, n) || subterm_less(m, n); }

}  // namespace

bool subterm_less(const TermP& m, const TermP& n) {
  if (n->node == Node::Lam) {
    std::string name = n->hint.empty() || occurs_free(n->body, n->hint) ? temp_name() : n->hint;
    return sub_or_eq(m, open(n->body, name));
  }
  if (n->node != Node::App || n->head.kind != HeadKind::Const) return false;
  for (auto& a : n->args)
    if (sub_or_eq(m, a)) return true;
  return false;
}

bool order_equal(const TerminationOrder& o, const std::vector<TermP>& small, const std::vector<TermP>& big) {
  if (o.kind == TerminationOrder::Kind::Subterm) {
    auto i = static_cast<size_t>(o.position);
    return i < small.size() && i < big.size() && alpha_eq(small[i], big[i]);
  }
  for (auto& p : o.parts)
    if (!order_equal(p, small, big)) return false;
  return true;
}

bool order_less(const TerminationOrder& o, const std::vector<TermP>& small, const std::vector<TermP>& big) {
  switch (o.kind) {
    case TerminationOrder::Kind::Subterm: {
      auto i = static_cast<size_t>(o.position);
      return i < small.size() && i < big.size() && subterm_less(small[i], big[i]);
    }
    case TerminationOrder::Kind::Lex:
      for (auto& p : o.parts) {
        if (order_less(p, small, big)) return true;
        if (!order_equal(p, small, big)) return false;
      }
      return false;
    case TerminationOrder::Kind::Simul: {
      bool strict = false;
      for (auto& p : o.parts) {
        if (order_less(p, small, big))
          strict = true;
        else if (!order_equal(p, small, big))
          return false;
      }
      return strict;
    }
  }
  return false;
}

}  // namespace lfm2
