#include "lfm2/m2io.h"

#include <sstream>

namespace lfm2 {

namespace {

const char* kCertHeader = "m2proof/1";

std::string pad(int n) { return std::string(static_cast<size_t>(n), ' '); }

void print_node(std::ostringstream& out, const ProofP& p, int indent) {
  out << pad(indent);
  switch (p->kind) {
    case ProofTerm::Kind::Rec:
      out << "(rec " << p->name << " (formula (" << print_context(p->formula.all) << ") (" << print_context(p->formula.ex)
          << "))\n";
      print_node(out, p->body, indent + 2);
      out << ")";
      return;
    case ProofTerm::Kind::All:
      out << "(all (" << print_context(p->ctx) << ")\n";
      print_node(out, p->body, indent + 2);
      out << ")";
      return;
    case ProofTerm::Kind::Let:
      out << "(let (" << p->name << " (" << p->target << " (" << print_subst(p->subst) << ")))\n";
      print_node(out, p->body, indent + 2);
      out << ")";
      return;
    case ProofTerm::Kind::Split:
      out << "(split " << p->name << " (" << print_context(p->ctx) << ")\n";
      print_node(out, p->body, indent + 2);
      out << ")";
      return;
    case ProofTerm::Kind::Witness:
      out << "(witness (" << print_subst(p->subst) << "))";
      return;
    case ProofTerm::Kind::Case:
      out << "(case " << p->name;
      for (auto& br : p->cases) {
        out << "\n"
            << pad(indent + 2) << "((pat (" << print_context(br.result) << ") (" << print_context(br.rest) << ") "
            << show(br.instance) << ")\n";
        print_node(out, br.body, indent + 4);
        out << ")";
      }
      out << ")";
      return;
  }
}

void print_order_rec(std::ostringstream& out, const TerminationOrder& o, const Context& all) {
  if (o.kind == TerminationOrder::Kind::Subterm) {
    out << all.entries.at(static_cast<size_t>(o.position)).name;
    return;
  }
  bool lex = o.kind == TerminationOrder::Kind::Lex;
  out << (lex ? "{" : "[");
  for (size_t i = 0; i < o.parts.size(); ++i) {
    if (i) out << " ";
    print_order_rec(out, o.parts[i], all);
  }
  out << (lex ? "}" : "]");
}

[[noreturn]] void malformed(const std::string& msg) { throw M2Error("MalformedCertificate", msg); }

// Order over names, resolved once the recursion formula is known.
struct NamedOrder {
  TerminationOrder::Kind kind = TerminationOrder::Kind::Subterm;
  std::string name;
  std::vector<NamedOrder> parts;
};

TerminationOrder resolve(const NamedOrder& o, const Context& all) {
  if (o.kind == TerminationOrder::Kind::Subterm) {
    long i = all.index_of(o.name);
    if (i < 0) malformed("order mentions " + o.name + ", which is not a universal variable");
    return TerminationOrder::arg(static_cast<int>(i));
  }
  std::vector<TerminationOrder> parts;
  for (auto& p : o.parts) parts.push_back(resolve(p, all));
  return o.kind == TerminationOrder::Kind::Lex ? TerminationOrder::lex(std::move(parts)) : TerminationOrder::simul(std::move(parts));
}

struct Reader {
  TokenStream& ts;
  const Signature& sig;

  void word(const std::string& w) {
    if (!ts.at_ident(w)) ts.fail("expected '" + w + "'");
    ts.next();
  }

  Context paren_context(const std::set<std::string>& scope) {
    ts.expect(Tok::LParen, "'('");
    Context c = read_context(ts, sig, scope);
    ts.expect(Tok::RParen, "')'");
    return c;
  }

  Subst paren_subst(const std::set<std::string>& scope) {
    ts.expect(Tok::LParen, "'('");
    Subst s = read_subst(ts, sig, scope);
    ts.expect(Tok::RParen, "')'");
    return s;
  }

  static std::set<std::string> with(std::set<std::string> scope, const Context& c) {
    for (auto& e : c.entries) scope.insert(e.name);
    return scope;
  }

  NamedOrder order() {
    NamedOrder o;
    if (ts.at(Tok::LBrace) || ts.at(Tok::LBracket)) {
      bool lex = ts.next().kind == Tok::LBrace;
      o.kind = lex ? TerminationOrder::Kind::Lex : TerminationOrder::Kind::Simul;
      while (!ts.at(lex ? Tok::RBrace : Tok::RBracket)) {
        if (ts.at(Tok::End)) ts.fail("unterminated order");
        o.parts.push_back(order());
      }
      ts.next();
      return o;
    }
    o.name = ts.expect_ident("an order variable");
    return o;
  }

  ProofP proof(const std::set<std::string>& scope) {
    ts.expect(Tok::LParen, "'('");
    std::string kw = ts.expect_ident("a proof term");
    ProofP out;
    if (kw == "rec") {
      std::string name = ts.expect_ident("an assumption name");
      ts.expect(Tok::LParen, "'('");
      word("formula");
      Formula f;
      f.all = paren_context({});
      f.ex = paren_context(with({}, f.all));
      ts.expect(Tok::RParen, "')'");
      out = mk_rec(name, f, TerminationOrder{}, proof(scope));
    } else if (kw == "all") {
      Context c = paren_context(scope);
      out = mk_all(c, proof(with(scope, c)));
    } else if (kw == "let") {
      ts.expect(Tok::LParen, "'('");
      std::string y = ts.expect_ident("an assumption name");
      ts.expect(Tok::LParen, "'('");
      std::string x = ts.expect_ident("an assumption name");
      Subst s = paren_subst(scope);
      ts.expect(Tok::RParen, "')'");
      ts.expect(Tok::RParen, "')'");
      out = mk_let(y, x, s, proof(scope));
    } else if (kw == "split") {
      std::string y = ts.expect_ident("an assumption name");
      Context c = paren_context(scope);
      out = mk_split(y, c, proof(with(scope, c)));
    } else if (kw == "witness") {
      out = mk_witness(paren_subst(scope));
    } else if (kw == "case") {
      std::string x = ts.expect_ident("a case variable");
      std::vector<CaseBranch> cases;
      while (ts.at(Tok::LParen)) {
        ts.next();
        ts.expect(Tok::LParen, "'('");
        word("pat");
        CaseBranch br;
        br.result = paren_context(scope);
        auto inner = with(scope, br.result);
        br.rest = paren_context(inner);
        br.instance = read_term(ts, sig, inner);
        ts.expect(Tok::RParen, "')'");
        br.body = proof(with(inner, br.rest));
        ts.expect(Tok::RParen, "')'");
        cases.push_back(std::move(br));
      }
      out = mk_case(x, std::move(cases));
    } else {
      malformed("unknown proof term '" + kw + "'");
    }
    ts.expect(Tok::RParen, "')'");
    return out;
  }
};

}  // namespace

std::string print_proof(const ProofP& p, int indent) {
  std::ostringstream out;
  print_node(out, p, indent);
  return out.str();
}

std::string print_rec_order(const TerminationOrder& o, const Context& all) {
  std::ostringstream out;
  print_order_rec(out, o, all);
  return out.str();
}

std::string print_certificate(const Certificate& c) {
  std::ostringstream out;
  out << kCertHeader << "\n";
  for (auto& t : c.theorems) {
    out << "(theorem " << t.family << " " << print_rec_order(t.proof->order, t.proof->formula.all) << "\n";
    print_node(out, t.proof, 2);
    out << ")\n";
  }
  return out.str();
}

Certificate read_certificate(const std::string& text, const Signature& sig) {
  Certificate cert;
  try {
    TokenStream ts(tokenize(text));
    if (ts.at(Tok::End)) malformed("empty certificate");
    if (!ts.at_ident("m2proof")) malformed("missing m2proof header");
    ts.next();
    ts.expect(Tok::Slash, "'/'");
    if (!ts.at_ident("1")) throw M2Error("VersionMismatch", "unsupported certificate version " + ts.peek().text);
    ts.next();
    Reader rd{ts, sig};
    while (!ts.at(Tok::End)) {
      ts.expect(Tok::LParen, "'('");
      rd.word("theorem");
      Theorem t;
      t.family = ts.expect_ident("a family name");
      NamedOrder o = rd.order();
      ProofP p = rd.proof({});
      if (p->kind != ProofTerm::Kind::Rec) malformed("theorem " + t.family + " does not start with rec");
      auto rec = std::make_shared<ProofTerm>(*p);
      rec->order = resolve(o, rec->formula.all);
      t.proof = rec;
      ts.expect(Tok::RParen, "')'");
      cert.theorems.push_back(std::move(t));
    }
  } catch (const SyntaxError& e) {
    malformed(e.what());
  }
  if (cert.theorems.empty()) malformed("certificate has no theorems");
  return cert;
}

void verify_certificate(const SourceFile& src, const Certificate& cert) {
  for (auto& total : src.totals) {
    const ModeSpec* ms = nullptr;
    for (auto& m : src.modes)
      if (m.family == total.family) ms = &m;
    if (!ms) throw M2Error("MissingMode", "no %mode for " + total.family);
    ModedFamily mf = elaborate_mode(total.family, src.sig, ms->params);
    Formula f = family_to_formula(mf);
    const Theorem* th = nullptr;
    for (auto& t : cert.theorems)
      if (t.family == total.family) th = &t;
    if (!th) throw M2Error("MissingTheorem", "certificate has no theorem for " + total.family);
    if (!formula_alpha_eq(th->proof->formula, f))
      throw M2Error("TheoremMismatch", "theorem for " + total.family + " does not state its meta-theorem");
    Sequent s;
    s.goal = f;
    check_proof(s, th->proof, src.sig);
  }
}

}  // namespace lfm2
