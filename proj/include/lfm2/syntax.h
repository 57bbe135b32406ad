#pragma once

#include <map>

#include "lfm2/lf.h"

namespace lfm2 {

struct SyntaxError : std::runtime_error {
  std::string kind;  // ParseError, UndeclaredIdentifier, ReconstructionAmbiguous, IllTyped, ...
  int line = 0;
  int col = 0;
  SyntaxError(std::string k, const std::string& msg, int l = 0, int c = 0)
      : std::runtime_error(k + (l > 0 ? " at " + std::to_string(l) + ":" + std::to_string(c) : std::string()) + ": " + msg),
        kind(std::move(k)),
        line(l),
        col(c) {}
};

enum class Tok : unsigned char { Ident, LParen, RParen, LBracket, RBracket, LBrace, RBrace, Colon, Dot, Slash, Comma, Directive, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

std::vector<Token> tokenize(const std::string& text);

struct SExpr;
using SExprP = std::shared_ptr<const SExpr>;

// Surface term before name resolution.
struct SExpr {
  enum class K : unsigned char { Ident, Type, Hole, App, Pi, Lam, Arrow, Ascribe };
  K k = K::Ident;
  std::string name;           // Ident; binder name for Pi / Lam
  SExprP a;                   // App head; binder domain (may be null); Arrow domain; Ascribe term
  SExprP b;                   // binder body; Arrow codomain; Ascribe type
  std::vector<SExprP> args;   // App
  bool backward = false;      // Arrow written `b <- a`
  int line = 0;
  int col = 0;
};

class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek(size_t ahead = 0) const;
  Token next();
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const std::string& s) const { return peek().kind == Tok::Ident && peek().text == s; }
  Token expect(Tok k, const std::string& what);
  std::string expect_ident(const std::string& what);
  [[noreturn]] void fail(const std::string& msg) const;

  // term ::= arrow ('<-' arrow)* ; arrow ::= app ('->' arrow)?
  SExprP term();

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  SExprP arrow();
  SExprP app();
  SExprP atom();
  SExprP binder();
  bool starts_atom() const;
};

// Resolve a surface term against a signature and a set of variable names in
// scope, without reconstruction: the text must already be canonical.
TermP resolve_term(const SExprP& s, const Signature& sig, const std::set<std::string>& vars);
// As resolve_term, but identifiers that are neither bound nor declared become
// free variables and are added to `unknown`.
TermP resolve_term_lenient(const SExprP& s, const Signature& sig, const std::set<std::string>& vars,
                           std::set<std::string>& unknown);
TermP read_term(TokenStream& ts, const Signature& sig, const std::set<std::string>& vars);

// Contexts print as `{x:A} {y:B}`; substitutions as `M/x (c N)/y` (the caller adds the outer parentheses).
std::string print_context(const Context& ctx);
std::string print_subst(const Subst& s);
// Reads `{x:A}` entries up to the next ')' ; names accumulate into scope as they are bound.
Context read_context(TokenStream& ts, const Signature& sig, std::set<std::string> scope);
// Reads `M/x` bindings up to the next ')'.
Subst read_subst(TokenStream& ts, const Signature& sig, const std::set<std::string>& scope);

bool is_reserved_ident(const std::string& s);

}  // namespace lfm2
