#include "helpers.h"

using namespace lfm2;
using namespace lfm2::test;

namespace {

const SourceFile& subred() {
  static const SourceFile src = load_fixture("subred.elf");
  return src;
}

// First-order terms over one constructor of each arity.
const SourceFile& grid() {
  static const SourceFile src = parse_text(
      "nat : type.\n"
      "z : nat.\n"
      "s : nat -> nat.\n"
      "node : nat -> nat -> nat.\n");
  return src;
}

UnifOutcome unify_flex(const Signature& sig, const std::string& ctx_text, TermP lhs, TermP rhs) {
  UnifProblem p;
  p.ctx = context(sig, ctx_text);
  p.flex = p.ctx.names();
  p.add(std::move(lhs), std::move(rhs));
  NameSupply supply;
  return unify(p, sig, supply);
}

TermP random_grid_term(std::mt19937& rng, int depth, const std::vector<std::string>& vars) {
  int choice = std::uniform_int_distribution<int>(0, depth <= 0 ? 1 : 3)(rng);
  if (choice == 0) return mk_const("z");
  if (choice == 1) return mk_free(pick(vars, rng));
  if (choice == 2) return mk_const("s", {random_grid_term(rng, depth - 1, vars)});
  return mk_const("node", {random_grid_term(rng, depth - 1, vars), random_grid_term(rng, depth - 1, vars)});
}

}  // namespace

TEST_SUITE_BEGIN("unify");

TEST_CASE("strict occurrences") {
  const Signature& sig = subred().sig;
  CHECK(strict_occurrence_exists(term(sig, "eval E V", {"E", "V"}), "E"));
  CHECK(strict_occurrence_exists(term(sig, "{x:tm} of (M x) T", {"M", "T"}), "M"));
  Signature fsig = parse_text("tm : type. c : tm.").sig;
  TermP nested = term(fsig, "F (G c)", {"F", "G"});
  CHECK_FALSE(strict_occurrence_exists(nested, "G"));
  CHECK(is_strict_term(term(sig, "eval (app M N) V", {"M", "N", "V"}), {"M", "N", "V"}));
  CHECK_FALSE(is_strict_term(term(fsig, "F c", {"F"}), {"F"}));
  CHECK(is_strict_term(term(sig, "abs [x:tm] M x", {"M"}), {"M"}));
  CHECK_FALSE(is_strict_term(term(sig, "abs [x:tm] M x x", {"M"}), {"M"}));
}

TEST_CASE("unify examples") {
  const Signature& sig = subred().sig;
  auto out = unify_flex(sig, "{E:tm} {V:tm} {M:tm -> tm}", term(sig, "eval E V", {"E", "V"}),
                        term(sig, "eval (abs [x:tm] M x) (abs [x:tm] M x)", {"M"}));
  REQUIRE(out.ok());
  CHECK(alpha_eq(*out.subst.lookup("E"), term(sig, "abs [x:tm] M x", {"M"})));
  CHECK(alpha_eq(*out.subst.lookup("V"), term(sig, "abs [x:tm] M x", {"M"})));
  CHECK(unify_flex(sig, "", mk_const("tm"), mk_const("ty")).kind == UnifOutcome::Kind::NoSolution);
  CHECK(unify_flex(sig, "{E:tm}", mk_free("E"), term(sig, "app E E", {"E"})).kind == UnifOutcome::Kind::NoSolution);
}

TEST_CASE("splitting D1 : eval E V on ev-abs") {
  const Signature& sig = subred().sig;
  Context ctx = context(sig, "{E:tm} {V:tm} {D1:eval E V}");
  CasePermutation perm = case_permutation(ctx, "D1");
  CHECK(perm.prefix.names() == std::vector<std::string>{"E", "V"});
  NameSupply supply;
  CaseSplit sp = split_on(perm, *sig.find("ev-abs"), sig, supply);
  REQUIRE(sp.kind == CaseSplit::Kind::Mgu);
  REQUIRE(sp.result.size() == 1);
  std::string m = sp.result.entries[0].name;
  TermP absm = eta_var(m, sp.result.entries[0].type);
  CHECK(alpha_eq(*sp.mgu.lookup("E"), mk_const("abs", {absm})));
  CHECK(alpha_eq(*sp.mgu.lookup("V"), mk_const("abs", {absm})));
  CHECK(alpha_eq(*sp.mgu.lookup("D1"), mk_const("ev-abs", {absm})));
  CHECK(split_on(perm, *sig.find("of-abs"), sig, supply).kind == CaseSplit::Kind::NoSolution);
}

TEST_CASE("match examples") {
  const Signature& sig = subred().sig;
  NameSupply supply;
  Signature csig = parse_text("tm : type. app : tm -> tm -> tm. c : tm. d : tm. eval : tm -> tm -> type.").sig;
  auto m1 = match(term(csig, "eval E V", {"E", "V"}), term(csig, "eval c d"), context(csig, "{E:tm} {V:tm}"), csig, supply);
  REQUIRE(m1.ok());
  CHECK(alpha_eq(*m1.subst.lookup("E"), mk_const("c")));
  CHECK(alpha_eq(*m1.subst.lookup("V"), mk_const("d")));
  auto m2 = match(term(csig, "app M M", {"M"}), term(csig, "app c d"), context(csig, "{M:tm}"), csig, supply);
  CHECK_FALSE(m2.ok());
  auto m3 = match(term(sig, "of (abs [x:tm] M x) (arr T1 T2)", {"M", "T1", "T2"}), term(sig, "of (abs [x:tm] x) (arr b b)"),
                  context(sig, "{M:tm -> tm} {T1:ty} {T2:ty}"), sig, supply);
  REQUIRE(m3.ok());
  CHECK(alpha_eq(*m3.subst.lookup("M"), term(sig, "[x:tm] x")));
  CHECK(alpha_eq(*m3.subst.lookup("T1"), mk_const("b")));
  CHECK(alpha_eq(*m3.subst.lookup("T2"), mk_const("b")));
}

TEST_CASE("non-pattern equations are outside the fragment") {
  const Signature& sig = subred().sig;
  auto out = unify_flex(sig, "{F:tm -> tm} {G:tm -> tm}", term(sig, "F (app (abs [x:tm] x) (abs [x:tm] x))", {"F"}),
                        term(sig, "G (abs [x:tm] x)", {"G"}));
  CHECK(out.kind == UnifOutcome::Kind::OutsideFragment);
}

TEST_CASE("property: mgus solve their equations and agree with a brute-force grid") {
  const Signature& sig = grid().sig;
  std::mt19937 rng(5);
  std::vector<std::string> vars{"X", "Y"};
  Context ctx = context(sig, "{X:nat} {Y:nat}");
  auto values = enumerate_objects(sig, {}, mk_const("nat"), 3);
  int solved = 0, refuted = 0;
  for (int i = 0; i < 300; ++i) {
    TermP lhs = random_grid_term(rng, 2, vars);
    TermP rhs = random_grid_term(rng, 2, vars);
    auto out = unify_flex(sig, "{X:nat} {Y:nat}", lhs, rhs);
    REQUIRE(out.kind != UnifOutcome::Kind::OutsideFragment);
    bool grid_unifier = false;
    for (auto& x : values)
      for (auto& y : values) {
        SubstMap g{{"X", x}, {"Y", y}};
        if (alpha_eq(hsubst(lhs, g), hsubst(rhs, g))) grid_unifier = true;
      }
    if (out.ok()) {
      ++solved;
      CHECK(alpha_eq(apply_subst(lhs, out.subst), apply_subst(rhs, out.subst)));
      CHECK_NOTHROW(check_subst_typing(out.result, sig, out.subst, ctx));
    } else {
      ++refuted;
      CHECK_FALSE(grid_unifier);
    }
    if (grid_unifier) CHECK(out.ok());
  }
  CHECK(solved > 20);
  CHECK(refuted > 20);
}

TEST_CASE("property: match recovers the instantiating substitution") {
  const Signature& sig = parse_text(
                             "tm : type.\n"
                             "c : tm.\n"
                             "app : tm -> tm -> tm.\n"
                             "lam : (tm -> tm) -> tm.\n")
                             .sig;
  std::mt19937 rng(9);
  Context pv = context(sig, "{X:tm} {Y:tm} {F:tm -> tm}");
  std::vector<TermP> patterns{
      term(sig, "app X Y", {"X", "Y"}),
      term(sig, "lam [x:tm] F x", {"F"}),
      term(sig, "app (lam [x:tm] app (F x) x) X", {"F", "X"}),
      term(sig, "lam [x:tm] app (F x) (lam [y:tm] app Y y)", {"F", "Y"}),
  };
  auto closed = enumerate_objects(sig, {}, mk_const("tm"), 3);
  auto funs = enumerate_objects(sig, {}, term(sig, "tm -> tm"), 3);
  REQUIRE(!closed.empty());
  REQUIRE(!funs.empty());
  for (int i = 0; i < 200; ++i) {
    const TermP& p = pick(patterns, rng);
    SubstMap sigma{{"X", pick(closed, rng)}, {"Y", pick(closed, rng)}, {"F", pick(funs, rng)}};
    TermP target = hsubst(p, sigma);
    NameSupply supply;
    Context vars;
    for (auto& e : pv.entries)
      if (occurs_free(p, e.name)) vars.entries.push_back(e);
    auto out = match(p, target, vars, sig, supply);
    INFO(show(p), " against ", show(target), ": ", out.reason);
    REQUIRE(out.ok());
    for (auto& v : free_vars(p)) {
      REQUIRE(out.subst.lookup(v));
      CHECK(alpha_eq(*out.subst.lookup(v), sigma[v]));
    }
  }
}

TEST_CASE("renamings") {
  Subst r = subst_of({{"x", mk_free("y")}, {"y", mk_free("x")}});
  auto ren = as_renaming(r);
  REQUIRE(ren);
  CHECK(ren->at("x") == "y");
  CHECK_FALSE(as_renaming(subst_of({{"x", mk_free("z")}, {"y", mk_free("z")}})));
  CHECK_FALSE(as_renaming(subst_of({{"x", mk_const("c")}})));
}

TEST_SUITE_END();
