#include <map>
#include <regex>

#include "helpers.h"

using namespace lfm2;
using namespace lfm2::test;

namespace {

Pipeline& pipeline(const std::string& name) {
  static std::map<std::string, Pipeline> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, run_pipeline(name)).first;
  return it->second;
}

size_t clause_index(const TotalityResult& r, const std::string& name) {
  for (size_t i = 0; i < r.clauses.size(); ++i)
    if (r.clauses[i].name == name) return i;
  throw std::logic_error("no clause " + name);
}

// Proof-term constructors along the leftmost path, e.g. "let split case".
std::string spine_shape(const ProofP& p) {
  static const char* names[] = {"rec", "all", "let", "split", "witness", "case"};
  std::string out;
  for (ProofP cur = p; cur;) {
    if (!out.empty()) out += " ";
    out += names[static_cast<int>(cur->kind)];
    if (cur->kind == ProofTerm::Kind::Case) {
      out += "/" + std::to_string(cur->cases.size());
      cur = cur->cases.empty() ? nullptr : cur->cases[0].body;
    } else {
      cur = cur->body;
    }
  }
  return out;
}

// Printed proof with generated names renumbered by first occurrence.
std::string canonical_print(const ProofP& p) {
  static const std::regex fresh(R"(([A-Za-z0-9_']+)#[0-9]+)");
  std::string text = print_proof(p), out;
  std::map<std::string, std::string> seen;
  auto last = text.cbegin();
  for (std::sregex_iterator it(text.begin(), text.end(), fresh), end; it != end; ++it) {
    out.append(last, (*it)[0].first);
    auto [pos, added] = seen.emplace(it->str(), "");
    if (added) pos->second = (*it)[1].str() + "#" + std::to_string(seen.size());
    out += pos->second;
    last = (*it)[0].second;
  }
  out.append(last, text.cend());
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("proofgen");

TEST_CASE("initial step and frontier") {
  Pipeline& p = pipeline("plus.elf");
  const TotalityResult& r = p.results[0];
  Sequent s = initial_sequent(r.mf);
  CHECK(s.ctx.names() == std::vector<std::string>{"M", "N"});
  REQUIRE(s.delta.size() == 1);
  CHECK(s.delta[0].name == kInductionHypothesis);
  CHECK(s.goal.all.empty());
  CHECK(s.goal.ex.names() == std::vector<std::string>{"K", "D"});
  ProofP init = initial_step(r.mf, r.order, mk_witness(Subst{}));
  CHECK(spine_shape(init) == "rec all witness");
  CHECK(rsc_holds(r.input_trace->goal, s, r.mf));

  SourceFile none = parse_text("o : type.\nc : o.\nr : o -> type.\nr-c : r c.\n%mode r -X.\n");
  ModedFamily mf = moded_family(none, "r");
  CHECK(initial_sequent(mf).ctx.empty());
  ProofP empty = initial_step(mf, TerminationOrder::lex({}), mk_witness(Subst{}));
  CHECK(empty->body->kind == ProofTerm::Kind::All);
  CHECK(empty->body->ctx.empty());
}

TEST_CASE("the correspondence rejects a mismatched output context") {
  Pipeline& p = pipeline("subred.elf");
  const TotalityResult& r = p.results[0];
  Sequent s = initial_sequent(r.mf);
  CHECK(rsc_holds(r.input_trace->goal, s, r.mf));
  Sequent wrong = s;
  wrong.goal.ex.entries.erase(wrong.goal.ex.entries.begin());
  CHECK_FALSE(rsc_holds(r.input_trace->goal, wrong, r.mf));
  Sequent no_ih = s;
  no_ih.delta.clear();
  CHECK_FALSE(rsc_holds(r.input_trace->goal, no_ih, r.mf));
}

TEST_CASE("replaying the input trace") {
  Pipeline& p = pipeline("plus.elf");
  const TotalityResult& r = p.results[0];
  std::vector<std::string> leaves;
  ProofP body = replay_input_trace(r, [&](const TraceNode& n) {
    leaves.push_back(n.pattern);
    return mk_witness(Subst{});
  });
  REQUIRE(body->kind == ProofTerm::Kind::Case);
  CHECK(body->name == "M");
  CHECK(body->cases.size() == 2);
  CHECK(leaves == std::vector<std::string>{"plus-z", "plus-s"});

  Pipeline& sr = pipeline("subred.elf");
  ProofP sbody = replay_input_trace(sr.results[0], [](const TraceNode&) { return mk_witness(Subst{}); });
  CHECK(sbody->kind == ProofTerm::Kind::Case);
  CHECK(sbody->name == "D1");

  SourceFile one = parse_text("o : type.\nc : o.\nr : o -> type.\n%mode r +X.\nr-any : r X.\n%total X (r X).\n");
  NameSupply supply = seeded_supply(one.sig);
  ModedFamily mf = moded_family(one, "r");
  TotalityResult tr = check_totality(mf, resolve_order(one.totals[0], mf), one.sig, supply);
  CHECK(tr.input_trace->kind == TraceNode::Kind::Covered);
  ProofP leaf = mk_witness(Subst{});
  CHECK(replay_input_trace(tr, [&](const TraceNode&) { return leaf; }) == leaf);
}

TEST_CASE("translating clauses") {
  Pipeline& p = pipeline("subred.elf");
  const TotalityResult& r = p.results[0];
  const Signature& sig = p.src.sig;
  ProofP abs = translate_clause(r, clause_index(r, "sr-abs"), sig, p.supply);
  REQUIRE(abs->kind == ProofTerm::Kind::Witness);
  REQUIRE(abs->subst.lookup("D3"));
  CHECK(alpha_eq(*abs->subst.lookup("D3"), mk_free("Dty")));
  REQUIRE(abs->subst.lookup("D"));
  CHECK((*abs->subst.lookup("D"))->head.name == "sr-abs");

  ProofP app = translate_clause(r, clause_index(r, "sr-app"), sig, p.supply);
  CHECK(spine_shape(app) == "let split case/1 let split witness");

  Pipeline& plus = pipeline("plus.elf");
  const TotalityResult& pr = plus.results[0];
  CHECK(spine_shape(translate_clause(pr, clause_index(pr, "plus-s"), plus.src.sig, plus.supply)) == "let split witness");
  CHECK(spine_shape(translate_clause(pr, clause_index(pr, "plus-z"), plus.src.sig, plus.supply)) == "witness");

  for (auto* f : {&p, &plus})
    for (size_t c = 0; c < f->results[0].clauses.size(); ++c) {
      ProofP proof = translate_clause(f->results[0], c, f->src.sig, f->supply);
      CHECK_NOTHROW(check_proof(clause_sequent(f->results[0], c), proof, f->src.sig));
    }
}

TEST_CASE("instantiating under the identity gives the same proof") {
  for (const char* name : {"plus.elf", "subred.elf"}) {
    Pipeline& p = pipeline(name);
    const TotalityResult& r = p.results[0];
    for (size_t c = 0; c < r.clauses.size(); ++c) {
      Sequent s = clause_sequent(r, c);
      ProofP proof = translate_clause(r, c, p.src.sig, p.supply);
      SubstMap id;
      for (auto& e : s.ctx.entries) id[e.name] = eta_var(e.name, e.type);
      ProofP again = instantiate_proof(proof, id, s.ctx, p.src.sig, p.supply);
      CHECK(canonical_print(again) == canonical_print(proof));
      CHECK_NOTHROW(check_proof(s, again, p.src.sig));
    }
  }
}

TEST_CASE("instantiating sr-abs under the ev-abs branch") {
  Pipeline& p = pipeline("subred.elf");
  const TotalityResult& r = p.results[0];
  const Signature& sig = p.src.sig;
  size_t ci = clause_index(r, "sr-abs");
  const TraceNode* leaf = nullptr;
  for (auto* l : trace_leaves(r.input_trace))
    if (l->pattern == "sr-abs") leaf = l;
  REQUIRE(leaf);
  ProofP proof = translate_clause(r, ci, sig, p.supply);
  ProofP inst = instantiate_proof(proof, leaf->witness.map(), leaf->goal.ctx, sig, p.supply);
  Sequent s;
  s.ctx = leaf->goal.ctx;
  Formula f = family_to_formula(r.mf);
  s.delta.push_back({kInductionHypothesis, f});
  SubstMap inputs;
  for (size_t i = 0; i < f.all.size(); ++i) inputs[f.all.entries[i].name] = leaf->goal.inputs[i];
  s.goal = Formula{{}, instantiate_ex(f, inputs)};
  CHECK(rsc_holds(leaf->goal, s, r.mf));
  CHECK_NOTHROW(check_proof(s, inst, sig));
}

TEST_CASE("a trace-free family produces the minimal certificate") {
  SourceFile src = parse_text("o : type.\nc : o.\nr : o -> type.\n%mode r +X.\nr-c : r c.\n%total X (r X).\n");
  NameSupply supply = seeded_supply(src.sig);
  ModedFamily mf = moded_family(src, "r");
  TotalityResult tr = check_totality(mf, resolve_order(src.totals[0], mf), src.sig, supply);
  ProofP proof = generate(tr, src.sig, supply);
  CHECK(spine_shape(proof) == "rec all case/1 witness");
  Sequent s;
  s.goal = family_to_formula(mf);
  CHECK_NOTHROW(check_proof(s, proof, src.sig));
}

TEST_CASE("generated certificates check and terminate") {
  for (const char* name : {"plus.elf", "subred.elf"}) {
    Pipeline& p = pipeline(name);
    for (size_t i = 0; i < p.results.size(); ++i) {
      Sequent s;
      s.goal = family_to_formula(p.results[i].mf);
      CHECK_NOTHROW(check_proof(s, p.proofs[i], p.src.sig));
      CHECK(proofterm_terminates(p.proofs[i]->body, p.proofs[i]->name, p.proofs[i]->formula, p.proofs[i]->order,
                                 p.src.sig));
    }
  }
}

TEST_CASE("recursions cannot be instantiated") {
  Pipeline& p = pipeline("plus.elf");
  CHECK(error_kind_of([&] { instantiate_proof(p.proofs[0], {}, {}, p.src.sig, p.supply); }) == "InstantiationBroken");
}

TEST_SUITE_END();
