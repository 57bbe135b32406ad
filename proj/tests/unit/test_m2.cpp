#include <map>

#include "helpers.h"

using namespace lfm2;
using namespace lfm2::test;

namespace {

const Pipeline& pipeline(const std::string& name) {
  static std::map<std::string, Pipeline> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, run_pipeline(name)).first;
  return it->second;
}

Sequent closed_sequent(const Formula& f) {
  Sequent s;
  s.goal = f;
  return s;
}

std::string check_kind(const Sequent& s, const ProofP& p, const Signature& sig) {
  return error_kind_of([&] { check_proof(s, p, sig); });
}

// Copy of `p` with the first Case (pre-order) rewritten by `edit`.
ProofP mutate_first_case(const ProofP& p, const std::function<void(std::vector<CaseBranch>&)>& edit, bool& done) {
  if (!p || done) return p;
  auto copy = std::make_shared<ProofTerm>(*p);
  if (p->kind == ProofTerm::Kind::Case) {
    done = true;
    edit(copy->cases);
    return copy;
  }
  copy->body = mutate_first_case(p->body, edit, done);
  for (auto& c : copy->cases) c.body = mutate_first_case(c.body, edit, done);
  return copy;
}

TermP numeral(int n) {
  TermP t = mk_const("z");
  for (int i = 0; i < n; ++i) t = mk_const("s", {t});
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("m2");

TEST_CASE("meta-theorem formulas") {
  {
    const Pipeline& p = pipeline("subred.elf");
    Formula f = family_to_formula(p.results[0].mf);
    CHECK(f.all.names() == std::vector<std::string>{"E", "V", "T", "D1", "D2"});
    CHECK(f.ex.names() == std::vector<std::string>{"D3", "D"});
    CHECK(family_head(f.ex.entries.back().type) == "subred");
  }
  {
    const Pipeline& p = pipeline("plus.elf");
    Formula f = family_to_formula(p.results[0].mf);
    CHECK(f.all.names() == std::vector<std::string>{"M", "N"});
    CHECK(f.ex.names() == std::vector<std::string>{"K", "D"});
  }
  SourceFile src = parse_text("o : type.\nr : o -> type.\n%mode r +X.\n");
  Formula f = family_to_formula(moded_family(src, "r"));
  CHECK(f.all.names() == std::vector<std::string>{"X"});
  CHECK(f.ex.names() == std::vector<std::string>{"D"});
}

TEST_CASE("the empty witness proves the empty formula") {
  Signature sig = parse_text("o : type.").sig;
  CHECK_NOTHROW(check_proof(closed_sequent(Formula{}), mk_witness(Subst{}), sig));
  Formula needs;
  needs.ex = context(sig, "{X:o}");
  CHECK(check_kind(closed_sequent(needs), mk_witness(Subst{}), sig) != "");
}

TEST_CASE("generated certificates check") {
  for (const char* f : {"plus.elf", "subred.elf"}) {
    const Pipeline& p = pipeline(f);
    Sequent s = closed_sequent(family_to_formula(p.results[0].mf));
    CHECK_NOTHROW(check_proof(s, p.proofs[0], p.src.sig));
  }
}

TEST_CASE("deleting a case is caught") {
  const Pipeline& p = pipeline("subred.elf");
  bool done = false;
  ProofP cut = mutate_first_case(p.proofs[0], [](std::vector<CaseBranch>& cs) { cs.pop_back(); }, done);
  REQUIRE(done);
  Sequent s = closed_sequent(family_to_formula(p.results[0].mf));
  CHECK(check_kind(s, cut, p.src.sig) == "CaseNotExhaustive");
}

TEST_CASE("a case with the wrong pattern is caught") {
  const Pipeline& p = pipeline("plus.elf");
  bool done = false;
  ProofP swapped = mutate_first_case(
      p.proofs[0], [](std::vector<CaseBranch>& cs) { std::swap(cs[0].instance, cs[1].instance); }, done);
  REQUIRE(done);
  Sequent s = closed_sequent(family_to_formula(p.results[0].mf));
  CHECK_THROWS_AS(check_proof(s, swapped, p.src.sig), M2Error);
}

TEST_CASE("case analysis outside the pattern fragment is undecided") {
  SourceFile src = parse_text(
      "tm : type.\n"
      "k : tm.\n"
      "foo : tm -> type.\n"
      "c : {F:tm -> tm} {N:tm} foo (F N).\n");
  Sequent s;
  s.ctx = context(src.sig, "{D:foo k}");
  CHECK(check_kind(s, mk_case("D", {}), src.sig) == "UnificationUndecided");
}

TEST_CASE("recursion without a decrease is rejected") {
  const Pipeline& p = pipeline("plus.elf");
  const Signature& sig = p.src.sig;
  Formula f = family_to_formula(p.results[0].mf);
  Subst same;
  for (auto& e : f.all.entries) same.set(e.name, mk_free(e.name));
  Subst out;
  out.set("K", mk_free("K'"));
  out.set("D", mk_free("D'"));
  Context got;
  got.push("K'", mk_const("nat"));
  got.push("D'", term(sig, "plus M N K'", {"M", "N", "K'"}));
  ProofP body = mk_all(f.all, mk_let("y", "IH", same, mk_split("y", got, mk_witness(out))));
  TerminationOrder order = p.proofs[0]->order;
  CHECK_FALSE(proofterm_terminates(body, "IH", f, order, sig));
  CHECK(check_kind(closed_sequent(f), mk_rec("IH", f, order, body), sig) == "NonTerminatingRec");
  CHECK(proofterm_terminates(p.proofs[0]->body, "IH", f, order, sig));
  const Pipeline& sr = pipeline("subred.elf");
  CHECK(proofterm_terminates(sr.proofs[0]->body, "IH", family_to_formula(sr.results[0].mf), sr.proofs[0]->order,
                             sr.src.sig));
}

TEST_CASE("executing the plus certificate adds") {
  const Pipeline& p = pipeline("plus.elf");
  const Signature& sig = p.src.sig;
  Formula f = family_to_formula(p.results[0].mf);
  for (int m = 0; m <= 4; ++m)
    for (int n = 0; n <= 3; ++n) {
      Subst in = subst_of({{"M", numeral(m)}, {"N", numeral(n)}});
      Subst out = execute(p.proofs[0], in, sig);
      CHECK(alpha_eq(*out.lookup("K"), numeral(m + n)));
      CHECK_NOTHROW(check_subst_typing({}, sig, out, instantiate_ex(f, in.map())));
      Goal g{context(sig, "{K:nat}"), mk_const("plus", {numeral(m), numeral(n), mk_free("K")}), 10000};
      auto lp = solve_first(g, sig);
      REQUIRE(lp);
      CHECK(alpha_eq(lp->proof, *out.lookup("D")));
    }
}

TEST_CASE("executing the subred certificate on the beta step of the identity") {
  const Pipeline& p = pipeline("subred.elf");
  const Signature& sig = p.src.sig;
  TermP e = term(sig, "app (abs [x:tm] x) (abs [y:tm] y)");
  TermP v = term(sig, "abs [y:tm] y");
  TermP t = term(sig, "arr b b");
  TermP d1 = term(sig, "ev-app (abs [x:tm] x) (abs [y:tm] y) (abs [y:tm] y) ([x:tm] x) (ev-abs [y:tm] y) (ev-abs [x:tm] x)");
  TermP d2 = term(sig,
                  "of-app (abs [x:tm] x) (arr b b) (arr b b) (abs [y:tm] y)"
                  " (of-abs (arr b b) ([x:tm] x) (arr b b) ([x:tm] [d:of x (arr b b)] d))"
                  " (of-abs b ([y:tm] y) b ([y:tm] [d:of y b] d))");
  REQUIRE_NOTHROW(check_object({}, sig, d1, mk_const("eval", {e, v})));
  REQUIRE_NOTHROW(check_object({}, sig, d2, mk_const("of", {e, t})));
  Subst in = subst_of({{"E", e}, {"V", v}, {"T", t}, {"D1", d1}, {"D2", d2}});
  Subst out = execute(p.proofs[0], in, sig);
  CHECK_NOTHROW(check_object({}, sig, *out.lookup("D3"), mk_const("of", {v, t})));
  CHECK_NOTHROW(check_subst_typing({}, sig, out, instantiate_ex(family_to_formula(p.results[0].mf), in.map())));
  CHECK(error_kind_of([&] { execute(p.proofs[0], in, sig, 2); }) == "FuelExhausted");
}

TEST_CASE("executing a witness with no inputs returns it") {
  Signature sig = parse_text("o : type.\nc : o.\n").sig;
  Formula f;
  f.ex = context(sig, "{X:o}");
  Subst w = subst_of({{"X", mk_const("c")}});
  ProofP rec = mk_rec("IH", f, TerminationOrder::lex({}), mk_all({}, mk_witness(w)));
  CHECK_NOTHROW(check_proof(closed_sequent(f), rec, sig));
  Subst out = execute(rec, Subst{}, sig);
  REQUIRE(out.lookup("X"));
  CHECK(alpha_eq(*out.lookup("X"), mk_const("c")));
}

TEST_CASE("formula substitution avoids capture and leaves closed formulas alone") {
  Signature sig = parse_text("o : type.\np : o -> o -> type.\n").sig;
  Formula f;
  f.all = context(sig, "{x:o}");
  f.ex = Context{{{"d", term(sig, "p x y", {"x", "y"})}}};
  Formula g = subst_formula(f, {{"y", mk_free("x")}});
  CHECK(g.all.size() == 1);
  CHECK(g.all.entries[0].name != "x");
  CHECK(alpha_eq(g.ex.entries[0].type, mk_const("p", {mk_free(g.all.entries[0].name), mk_free("x")})));
  Formula closed;
  closed.all = context(sig, "{x:o} {y:o}");
  closed.ex = Context{{{"d", term(sig, "p x y", {"x", "y"})}}};
  Formula same = subst_formula(closed, {{"x", mk_free("y")}});
  CHECK(same.all.names() == closed.all.names());
  CHECK(formula_alpha_eq(same, closed));
}

TEST_SUITE_END();
