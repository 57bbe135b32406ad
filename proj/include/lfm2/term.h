#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace lfm2 {

// Locally nameless LF terms. Binders introduce de Bruijn indices; free
// variables and constants are named. One syntax serves all three levels:
// kinds (Type, Pi), families (Pi, Lam, App with a family head) and objects
// (Lam, App with an object constant or variable head).
enum class Node : unsigned char { Type, Pi, Lam, App };
enum class HeadKind : unsigned char { Const, Free, Bound, Redex };

struct Term;
using TermP = std::shared_ptr<const Term>;

struct Head {
  HeadKind kind = HeadKind::Const;
  std::string name;  // Const / Free
  int index = 0;     // Bound
  TermP term;        // Redex: a non-canonical head term (parser output only)
};

struct Term {
  Node node = Node::Type;
  std::string hint;  // binder name for Pi / Lam
  TermP dom;         // Pi / Lam domain; Lam domain may be null before elaboration
  TermP body;        // Pi / Lam body (one more bound index)
  Head head;         // App
  std::vector<TermP> args;
};

TermP mk_type();
TermP mk_pi(std::string hint, TermP dom, TermP body);
TermP mk_lam(std::string hint, TermP dom, TermP body);
TermP mk_const(std::string name, std::vector<TermP> args = {});
TermP mk_free(std::string name, std::vector<TermP> args = {});
TermP mk_bound(int index, std::vector<TermP> args = {});
TermP mk_redex(TermP head, std::vector<TermP> args);
TermP mk_app(const Head& head, std::vector<TermP> args);
// Non-dependent arrow A -> B.
TermP mk_arrow(TermP dom, TermP cod);

// Internal names for opening binders; they start with a control character so
// they can never be produced by the parser.
std::string temp_name();
bool is_temp_name(const std::string& name);

// Replace bound index 0 (relative to the binder) by the free variable `name`.
TermP open(const TermP& body, const std::string& name);
// Abstract the free variable `name` into bound index 0.
TermP close(const TermP& t, const std::string& name);

using SubstMap = std::unordered_map<std::string, TermP>;

// Hereditary substitution of free variables: applying a substituted head that
// is a lambda reduces immediately, so canonical inputs yield canonical output.
TermP hsubst(const TermP& t, const SubstMap& map);
TermP hsubst1(const TermP& t, const std::string& name, const TermP& value);
// Apply a canonical function term to canonical arguments, reducing.
TermP happly(const TermP& f, const std::vector<TermP>& args);
// Instantiate the body of a binder with a value (hereditarily).
TermP instantiate(const TermP& body, const TermP& value);

// Structural equality modulo binder names.
bool alpha_eq(const TermP& a, const TermP& b);

// Free variables in order of first occurrence (binder domains included).
std::vector<std::string> free_vars(const TermP& t);
void collect_free_vars(const TermP& t, std::vector<std::string>& out, std::set<std::string>& seen);
bool occurs_free(const TermP& t, const std::string& name);
// Constants mentioned anywhere in the term.
void collect_consts(const TermP& t, std::set<std::string>& out);

// Number of leading Pi binders.
int pi_arity(const TermP& t);
// Strips leading Pi binders, returns the final target.
TermP pi_target(const TermP& t);

// If `t` is the eta-expansion of a free variable (possibly with zero
// arguments), return its name.
std::optional<std::string> as_eta_var(const TermP& t);

struct LfError : std::runtime_error {
  std::string rule;
  std::string path;
  LfError(std::string rule_, std::string msg, std::string path_ = "")
      : std::runtime_error(rule_ + ": " + msg + (path_.empty() ? "" : " at " + path_)),
        rule(std::move(rule_)),
        path(std::move(path_)) {}
};

// Debug / diagnostic printer (surface syntax, same as the frontend printer).
std::string show(const TermP& t);

}  // namespace lfm2
