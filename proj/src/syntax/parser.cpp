#include <cctype>
#include <sstream>

#include "lfm2/syntax.h"

namespace lfm2 {

namespace {

bool is_delim(char c) {
  switch (c) {
    case '.':
    case ':':
    case '(':
    case ')':
    case '[':
    case ']':
    case '{':
    case '}':
    case '%':
    case ',':
    case '/':
      return true;
    default:
      return false;
  }
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::shared_ptr<SExpr> node(SExpr::K k, const Token& at) {
  auto s = std::make_shared<SExpr>();
  s->k = k;
  s->line = at.line;
  s->col = at.col;
  return s;
}

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (is_space(c)) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (c == '%') {
      char d = i + 1 < text.size() ? text[i + 1] : ' ';
      if (d == '{') {
        size_t close = text.find("}%", i + 2);
        if (close == std::string::npos) throw SyntaxError("ParseError", "unterminated comment", line, col);
        advance(close + 2 - i);
        continue;
      }
      if (is_space(d) || d == '%') {
        while (i < text.size() && text[i] != '\n') advance(1);
        continue;
      }
      size_t j = i + 1;
      while (j < text.size() && !is_space(text[j]) && !is_delim(text[j])) ++j;
      t.kind = Tok::Directive;
      t.text = text.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (is_delim(c)) {
      switch (c) {
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '[': t.kind = Tok::LBracket; break;
        case ']': t.kind = Tok::RBracket; break;
        case '{': t.kind = Tok::LBrace; break;
        case '}': t.kind = Tok::RBrace; break;
        case ':': t.kind = Tok::Colon; break;
        case '.': t.kind = Tok::Dot; break;
        case '/': t.kind = Tok::Slash; break;
        default: t.kind = Tok::Comma; break;
      }
      t.text = std::string(1, c);
      advance(1);
      out.push_back(t);
      continue;
    }
    size_t j = i;
    while (j < text.size() && !is_space(text[j]) && !is_delim(text[j])) {
      if (text[j] == '?' || static_cast<unsigned char>(text[j]) < 0x20)
        throw SyntaxError("ParseError", "unexpected character", t.line, t.col + static_cast<int>(j - i));
      ++j;
    }
    t.kind = Tok::Ident;
    t.text = text.substr(i, j - i);
    advance(j - i);
    out.push_back(t);
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

const Token& TokenStream::peek(size_t ahead) const {
  size_t k = std::min(pos_ + ahead, toks_.size() - 1);
  return toks_[k];
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

void TokenStream::fail(const std::string& msg) const {
  const Token& t = peek();
  std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  throw SyntaxError("ParseError", msg + " near " + near, t.line, t.col);
}

Token TokenStream::expect(Tok k, const std::string& what) {
  if (!at(k)) fail("expected " + what);
  return next();
}

std::string TokenStream::expect_ident(const std::string& what) {
  if (!at(Tok::Ident) || is_reserved_ident(peek().text)) fail("expected " + what);
  return next().text;
}

bool is_reserved_ident(const std::string& s) { return s == "->" || s == "<-" || s == "type" || s == "_"; }

bool TokenStream::starts_atom() const {
  switch (peek().kind) {
    case Tok::Ident:
      return peek().text != "->" && peek().text != "<-";
    case Tok::LParen:
    case Tok::LBracket:
    case Tok::LBrace:
      return true;
    default:
      return false;
  }
}

SExprP TokenStream::term() {
  SExprP lhs = arrow();
  while (at_ident("<-")) {
    Token op = next();
    SExprP rhs = arrow();
    auto n = node(SExpr::K::Arrow, op);
    n->a = rhs;
    n->b = lhs;
    n->backward = true;
    lhs = n;
  }
  return lhs;
}

SExprP TokenStream::arrow() {
  SExprP lhs = app();
  if (at_ident("->")) {
    Token op = next();
    auto n = node(SExpr::K::Arrow, op);
    n->a = lhs;
    n->b = arrow();
    return n;
  }
  return lhs;
}

SExprP TokenStream::app() {
  if (!starts_atom()) fail("expected a term");
  Token first = peek();
  std::vector<SExprP> items;
  while (starts_atom()) {
    if (at(Tok::LBracket) || at(Tok::LBrace)) {
      items.push_back(binder());
      break;
    }
    items.push_back(atom());
  }
  if (items.size() == 1) return items[0];
  auto n = node(SExpr::K::App, first);
  n->a = items[0];
  n->args.assign(items.begin() + 1, items.end());
  return n;
}

SExprP TokenStream::atom() {
  Token t = peek();
  if (t.kind == Tok::LParen) {
    next();
    SExprP inner = term();
    if (at(Tok::Colon)) {
      Token c = next();
      auto n = node(SExpr::K::Ascribe, c);
      n->a = inner;
      n->b = term();
      inner = n;
    }
    expect(Tok::RParen, "')'");
    return inner;
  }
  if (t.kind != Tok::Ident) fail("expected a term");
  next();
  if (t.text == "type") return node(SExpr::K::Type, t);
  if (t.text == "_") return node(SExpr::K::Hole, t);
  auto n = node(SExpr::K::Ident, t);
  n->name = t.text;
  return n;
}

SExprP TokenStream::binder() {
  Token open = next();
  bool pi = open.kind == Tok::LBrace;
  auto n = node(pi ? SExpr::K::Pi : SExpr::K::Lam, open);
  n->name = expect_ident("a bound variable");
  if (at(Tok::Colon)) {
    next();
    n->a = term();
  }
  expect(pi ? Tok::RBrace : Tok::RBracket, pi ? "'}'" : "']'");
  n->b = term();
  return n;
}

namespace {

struct Resolver {
  const Signature& sig;
  const std::set<std::string>& vars;
  std::set<std::string>* unknown = nullptr;  // lenient mode: collects unresolved names as variables
  std::vector<std::pair<std::string, std::string>> locals;  // surface name, internal name

  [[noreturn]] void fail(const SExprP& s, const std::string& msg) const {
    throw SyntaxError("ParseError", msg, s->line, s->col);
  }

  Head head_of(const SExprP& s) {
    Head h;
    for (size_t i = locals.size(); i-- > 0;)
      if (locals[i].first == s->name) {
        h.kind = HeadKind::Free;
        h.name = locals[i].second;
        return h;
      }
    if (vars.count(s->name)) {
      h.kind = HeadKind::Free;
      h.name = s->name;
      return h;
    }
    if (sig.find(s->name)) {
      h.kind = HeadKind::Const;
      h.name = s->name;
      return h;
    }
    if (unknown) {
      unknown->insert(s->name);
      h.kind = HeadKind::Free;
      h.name = s->name;
      return h;
    }
    throw SyntaxError("UndeclaredIdentifier", "'" + s->name + "' is not in scope", s->line, s->col);
  }

  TermP binder(const SExprP& s, bool pi) {
    TermP dom = s->a ? go(s->a) : nullptr;
    if (pi && !dom) fail(s, "binder needs a type");
    std::string u = temp_name();
    locals.push_back({s->name, u});
    TermP body = go(s->b);
    locals.pop_back();
    return pi ? mk_pi(s->name, dom, close(body, u)) : mk_lam(s->name, dom, close(body, u));
  }

  TermP go(const SExprP& s) {
    switch (s->k) {
      case SExpr::K::Type:
        return mk_type();
      case SExpr::K::Hole:
        fail(s, "'_' is not allowed here");
      case SExpr::K::Ascribe:
        fail(s, "ascription is not allowed here");
      case SExpr::K::Arrow: {
        TermP dom = go(s->a);
        return mk_arrow(dom, go(s->b));
      }
      case SExpr::K::Pi:
        return binder(s, true);
      case SExpr::K::Lam:
        return binder(s, false);
      case SExpr::K::Ident:
        return mk_app(head_of(s), {});
      case SExpr::K::App: {
        std::vector<TermP> args;
        for (auto& a : s->args) args.push_back(go(a));
        if (s->a->k == SExpr::K::Ident) return mk_app(head_of(s->a), std::move(args));
        return mk_redex(go(s->a), std::move(args));
      }
    }
    fail(s, "unexpected term");
  }
};

}  // namespace

TermP resolve_term(const SExprP& s, const Signature& sig, const std::set<std::string>& vars) {
  Resolver r{sig, vars, nullptr, {}};
  return r.go(s);
}

TermP resolve_term_lenient(const SExprP& s, const Signature& sig, const std::set<std::string>& vars,
                           std::set<std::string>& unknown) {
  Resolver r{sig, vars, &unknown, {}};
  return r.go(s);
}

TermP read_term(TokenStream& ts, const Signature& sig, const std::set<std::string>& vars) {
  return resolve_term(ts.term(), sig, vars);
}

std::string print_context(const Context& ctx) {
  std::ostringstream out;
  for (size_t i = 0; i < ctx.entries.size(); ++i) {
    if (i) out << " ";
    out << "{" << ctx.entries[i].name << ":" << show(ctx.entries[i].type) << "}";
  }
  return out.str();
}

std::string print_subst(const Subst& s) {
  std::ostringstream out;
  for (size_t i = 0; i < s.binds.size(); ++i) {
    if (i) out << " ";
    const TermP& t = s.binds[i].term;
    bool atomic = t->node == Node::App && t->args.empty();
    out << (atomic ? show(t) : "(" + show(t) + ")") << "/" << s.binds[i].var;
  }
  return out.str();
}

Context read_context(TokenStream& ts, const Signature& sig, std::set<std::string> scope) {
  Context c;
  while (ts.at(Tok::LBrace)) {
    ts.next();
    std::string name = ts.expect_ident("a variable name");
    ts.expect(Tok::Colon, "':'");
    TermP type = read_term(ts, sig, scope);
    ts.expect(Tok::RBrace, "'}'");
    if (c.contains(name)) ts.fail("duplicate variable '" + name + "'");
    c.push(name, type);
    scope.insert(name);
  }
  return c;
}

Subst read_subst(TokenStream& ts, const Signature& sig, const std::set<std::string>& scope) {
  Subst s;
  while (!ts.at(Tok::RParen) && !ts.at(Tok::End)) {
    TermP t = read_term(ts, sig, scope);
    ts.expect(Tok::Slash, "'/'");
    std::string v = ts.expect_ident("a variable name");
    if (s.lookup(v)) ts.fail("duplicate binding for '" + v + "'");
    s.binds.push_back({v, t});
  }
  return s;
}

}  // namespace lfm2
