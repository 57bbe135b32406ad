#include <sstream>

#include "lfm2/syntax.h"
#include "lfm2/totality.h"

namespace lfm2 {

namespace {

const char* kTraceHeader = "covtrace/1";

std::string pad(int n) { return std::string(static_cast<size_t>(n), ' '); }

// Bindings of the case variable and its prefix, identity bindings dropped.
Subst visible_mgu(const CaseSplit& cs) {
  Subst s;
  for (auto& b : cs.mgu.binds) {
    auto v = as_eta_var(b.term);
    if (v && *v == b.var) continue;
    s.binds.push_back(b);
  }
  return s;
}

void print_tree(std::ostringstream& out, const TraceP& t, int indent) {
  switch (t->kind) {
    case TraceNode::Kind::Covered:
      out << pad(indent) << "(covered " << t->pattern << " (" << print_subst(t->witness) << "))";
      return;
    case TraceNode::Kind::Failed:
      out << pad(indent) << "(failed)";
      return;
    case TraceNode::Kind::Split:
      out << pad(indent) << "(split " << t->var;
      for (auto& c : t->children) {
        out << "\n" << pad(indent + 2) << "(" << c.split.constant << " (" << print_subst(visible_mgu(c.split)) << ")\n";
        print_tree(out, c.node, indent + 4);
        out << ")";
      }
      out << ")";
      return;
  }
}

[[noreturn]] void malformed(const std::string& msg) { throw TotalityError("MalformedTrace", msg); }

struct Reader {
  TokenStream& ts;
  const Signature& sig;
  NameSupply& supply;

  void expect_word(const std::string& w) {
    if (!ts.at_ident(w)) ts.fail("expected '" + w + "'");
    ts.next();
  }

  std::set<std::string> scope_of(const Context& c) {
    auto n = c.names();
    return {n.begin(), n.end()};
  }

  Subst read_lenient_subst() {
    Subst s;
    std::set<std::string> none;
    while (!ts.at(Tok::RParen) && !ts.at(Tok::End)) {
      std::set<std::string> unknown;
      TermP t = resolve_term_lenient(ts.term(), sig, none, unknown);
      ts.expect(Tok::Slash, "'/'");
      s.binds.push_back({ts.expect_ident("a variable name"), t});
    }
    return s;
  }

  // Renames the computed root goal to the recorded context names.
  CoverageGoal align_root(const CoverageGoal& computed) {
    ts.expect(Tok::LParen, "'('");
    expect_word("goal");
    Context rec = read_context(ts, sig, {});
    ts.expect(Tok::RParen, "')'");
    if (rec.size() != computed.ctx.size()) malformed("root goal context has the wrong length");
    SubstMap ren;
    std::unordered_map<std::string, std::string> names;
    for (size_t i = 0; i < rec.size(); ++i) {
      const Entry& c = computed.ctx.entries[i];
      const Entry& r = rec.entries[i];
      if (!alpha_eq(hsubst(c.type, ren), r.type)) malformed("root goal entry " + r.name + " has an unexpected type");
      ren[c.name] = eta_var(r.name, r.type);
      names[c.name] = r.name;
    }
    CoverageGoal g = computed;
    g.ctx = rec;
    for (auto& t : g.inputs) t = hsubst(t, ren);
    for (auto& t : g.outputs) t = hsubst(t, ren);
    for (auto& f : g.frozen) f = names.count(f) ? names[f] : f;
    return g;
  }

  // The computed split renamed so that its mgu equals the recorded one.
  CaseSplit align_split(const CasePermutation& perm, const CaseSplit& cs, const Subst& recorded) {
    std::vector<TermP> from;
    std::vector<TermP> to;
    std::vector<Entry> keys = perm.prefix.entries;
    keys.push_back(perm.var);
    for (auto& b : recorded.binds) {
      bool known = false;
      for (auto& k : keys) known |= k.name == b.var;
      if (!known) malformed("mgu for " + cs.constant + " binds " + b.var + ", which is not in the split prefix");
    }
    for (auto& k : keys) {
      const TermP* c = cs.mgu.lookup(k.name);
      const TermP* r = recorded.lookup(k.name);
      from.push_back(c ? *c : eta_var(k.name, k.type));
      to.push_back(r ? *r : eta_var(k.name, k.type));
    }
    auto ren = renaming_between(from, to, cs.result, sig, supply);
    if (!ren) malformed("mgu for " + cs.constant + " when splitting " + perm.var.name + " does not match the signature");
    SubstMap m;
    CaseSplit out = cs;
    out.result = Context{};
    for (auto& e : cs.result.entries) {
      TermP ty = hsubst(e.type, m);
      const std::string& n = ren->at(e.name);
      m[e.name] = eta_var(n, ty);
      out.result.push(n, ty);
    }
    for (auto& b : out.mgu.binds) b.term = hsubst(b.term, m);
    for (auto& e : out.rest.entries) e.type = hsubst(e.type, m);
    out.instance = hsubst(out.instance, m);
    std::set<std::string> seen;
    for (auto& e : concat(out.result, out.rest).entries)
      if (!seen.insert(e.name).second) malformed("case " + cs.constant + " reuses the name " + e.name);
    return out;
  }

  TraceP tree(const CoverageGoal& g, const std::vector<CoveragePattern>& pats) {
    auto node = std::make_shared<TraceNode>();
    node->goal = g;
    ts.expect(Tok::LParen, "'('");
    std::string kw = ts.expect_ident("split, covered or failed");
    if (kw == "failed") {
      node->kind = TraceNode::Kind::Failed;
      node->error = g.kind == CoverageGoal::Kind::Input ? "CoverageFailure" : "OutputCoverageFailure";
      node->reason = "recorded failure";
    } else if (kw == "covered") {
      node->kind = TraceNode::Kind::Covered;
      node->pattern = ts.expect_ident("a pattern name");
      ts.expect(Tok::LParen, "'('");
      node->witness = read_subst(ts, sig, scope_of(g.ctx));
      ts.expect(Tok::RParen, "')'");
      const CoveragePattern* pat = nullptr;
      for (auto& p : pats)
        if (p.id == node->pattern) pat = &p;
      if (!pat) malformed("unknown pattern " + node->pattern);
      std::vector<TermP> subj = g.subjects();
      SubstMap w = node->witness.map();
      for (size_t i = 0; i < subj.size(); ++i)
        if (!alpha_eq(hsubst(pat->subjects.at(i), w), subj[i])) malformed("witness for " + node->pattern + " does not match the goal");
    } else if (kw == "split") {
      node->kind = TraceNode::Kind::Split;
      node->var = ts.expect_ident("a variable");
      std::vector<CaseSplit> computed;
      try {
        computed = split_goal(g, node->var, sig, supply);
      } catch (const TotalityError& e) {
        malformed(std::string("cannot split: ") + e.what());
      }
      CasePermutation perm = case_permutation(g.ctx, node->var);
      for (auto& cs : computed) {
        ts.expect(Tok::LParen, "'('");
        std::string c = ts.expect_ident("a constant");
        if (c != cs.constant) malformed("expected case " + cs.constant + " but found " + c);
        ts.expect(Tok::LParen, "'('");
        Subst rec = read_lenient_subst();
        ts.expect(Tok::RParen, "')'");
        CaseSplit aligned = align_split(perm, cs, rec);
        TraceP sub = tree(child_goal(g, aligned), pats);
        node->children.push_back({aligned, sub});
        ts.expect(Tok::RParen, "')'");
      }
    } else {
      malformed("unknown trace node " + kw);
    }
    ts.expect(Tok::RParen, "')'");
    return node;
  }
};

}  // namespace

std::string print_trace_tree(const TraceP& t) {
  std::ostringstream out;
  print_tree(out, t, 0);
  return out.str();
}

std::string print_traces(const std::vector<const TotalityResult*>& results) {
  std::ostringstream out;
  out << kTraceHeader << "\n";
  for (auto* r : results) {
    out << "(input " << r->mf.family << " (goal " << print_context(r->input_trace->goal.ctx) << ")\n";
    print_tree(out, r->input_trace, 2);
    out << ")\n";
    for (auto& cr : r->clause_results)
      for (size_t i = 0; i < cr.output_traces.size(); ++i) {
        const TraceP& t = cr.output_traces[i];
        out << "(output " << cr.scaffold.clause.name << " " << (i + 1) << " (goal " << print_context(t->goal.ctx) << ")\n";
        print_tree(out, t, 2);
        out << ")\n";
      }
  }
  return out.str();
}

void read_traces(const std::string& text, const Signature& sig, std::vector<TotalityResult*>& results, NameSupply& supply) {
  // Names recorded in the trace must not collide with names made during replay.
  std::vector<Token> toks;
  try {
    toks = tokenize(text);
  } catch (const SyntaxError& e) {
    malformed(e.what());
  }
  for (auto& t : toks)
    if (t.kind == Tok::Ident) supply.next = std::max(supply.next, name_suffix(t.text) + 1);
  TokenStream ts(std::move(toks));
  try {
    if (!ts.at_ident("covtrace")) malformed("missing covtrace header");
    ts.next();
    ts.expect(Tok::Slash, "'/'");
    if (!ts.at_ident("1")) throw TotalityError("VersionMismatch", "unsupported trace version " + ts.peek().text);
    ts.next();
    Reader rd{ts, sig, supply};
    while (!ts.at(Tok::End)) {
      ts.expect(Tok::LParen, "'('");
      std::string kw = ts.expect_ident("input or output");
      if (kw == "input") {
        std::string fam = ts.expect_ident("a family");
        TotalityResult* r = nullptr;
        for (auto* x : results)
          if (x->mf.family == fam) r = x;
        if (!r) malformed("no %total for family " + fam);
        InputCoverageProblem prob = input_goal_and_patterns(r->mf, r->clauses);
        CoverageGoal g = rd.align_root(prob.goal);
        r->input_trace = rd.tree(g, prob.patterns);
      } else if (kw == "output") {
        std::string cname = ts.expect_ident("a clause");
        std::string idx = ts.expect_ident("a premise number");
        size_t k = 0;
        try {
          k = std::stoul(idx);
        } catch (const std::exception&) {
          malformed("bad premise number " + idx);
        }
        TotalityResult* r = nullptr;
        size_t ci = 0;
        for (auto* x : results)
          for (size_t j = 0; j < x->clauses.size(); ++j)
            if (x->clauses[j].name == cname) {
              r = x;
              ci = j;
            }
        if (!r) malformed("unknown clause " + cname);
        if (r->clause_results.size() < r->clauses.size()) r->clause_results.resize(r->clauses.size());
        ClauseResult& cr = r->clause_results[ci];
        if (cr.scaffold.clause.name.empty()) cr.scaffold = clause_scaffold(r->clauses[ci], r->mf);
        if (k < 1 || k > cr.scaffold.premise_args.size()) malformed("clause " + cname + " has no premise " + idx);
        OutputCoverageProblem prob = output_goal_and_pattern(cr.scaffold, k - 1, r->mf, supply);
        CoverageGoal g = rd.align_root(prob.goal);
        if (cr.output_traces.size() < cr.scaffold.premise_args.size()) cr.output_traces.resize(cr.scaffold.premise_args.size());
        cr.output_traces[k - 1] = rd.tree(g, {prob.pattern});
      } else {
        malformed("unknown trace entry " + kw);
      }
      ts.expect(Tok::RParen, "')'");
    }
  } catch (const SyntaxError& e) {
    malformed(e.what());
  }
}

}  // namespace lfm2
