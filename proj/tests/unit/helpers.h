#pragma once

#include "doctest.h"
#include "support/support.h"

namespace lfm2::test {

inline bool object_checks(const Context& ctx, const Signature& sig, const TermP& m, const TermP& a) {
  try {
    check_object(ctx, sig, m, a);
    return true;
  } catch (const LfError&) {
    return false;
  }
}

template <class Fn>
std::string error_kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const TotalityError& e) {
    return e.kind;
  } catch (const M2Error& e) {
    return e.kind;
  } catch (const LpError& e) {
    return e.kind;
  } catch (const ProofGenError& e) {
    return e.kind;
  } catch (const SyntaxError& e) {
    return e.kind;
  } catch (const LfError& e) {
    return e.rule;
  }
  return "";
}

inline Subst subst_of(std::initializer_list<std::pair<std::string, TermP>> binds) {
  Subst s;
  for (auto& [v, t] : binds) s.set(v, t);
  return s;
}

}  // namespace lfm2::test
