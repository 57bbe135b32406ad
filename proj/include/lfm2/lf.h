#pragma once

#include "lfm2/term.h"

namespace lfm2 {

struct Entry {
  std::string name;
  TermP type;
};

struct Context {
  std::vector<Entry> entries;

  const TermP* lookup(const std::string& name) const;
  bool contains(const std::string& name) const { return lookup(name) != nullptr; }
  long index_of(const std::string& name) const;
  void push(std::string name, TermP type) { entries.push_back({std::move(name), std::move(type)}); }
  std::vector<std::string> names() const;
  size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

Context concat(const Context& a, const Context& b);

enum class DeclKind : unsigned char { Family, Object };

struct Decl {
  std::string name;
  TermP type;  // kind for families, family for objects
  DeclKind kind = DeclKind::Object;
  int implicit_count = 0;  // leading Pi binders reconstructed from the source
};

struct Signature {
  std::vector<Decl> decls;
  std::unordered_map<std::string, size_t> index;

  const Decl* find(const std::string& name) const;
  void add(Decl d);
  bool is_family(const std::string& name) const;
};

struct Binding {
  std::string var;
  TermP term;
};

// Ordered finite substitution; identity outside its bindings.
struct Subst {
  std::vector<Binding> binds;

  const TermP* lookup(const std::string& name) const;
  void set(const std::string& name, TermP term);
  SubstMap map() const;
  bool empty() const { return binds.empty(); }
  size_t size() const { return binds.size(); }
};

TermP apply_subst(const TermP& t, const Subst& s);
Context apply_subst(const Context& c, const Subst& s);
// Pointwise composition: (s1, M/x) o s2 = (s1 o s2, M[s2]/x).
Subst compose_subst(const Subst& s1, const Subst& s2);
// Composition after padding s1 with identities over its domain context.
Subst compose_subst(const Subst& s1, const Subst& s2, const Context& s1_domain);
Subst restrict_subst(const Subst& s, const std::vector<std::string>& names);

void check_kind(const Context& ctx, const Signature& sig, const TermP& k);
void check_family(const Context& ctx, const Signature& sig, const TermP& a, const TermP& k);
void check_object(const Context& ctx, const Signature& sig, const TermP& m, const TermP& a);
void check_context(const Signature& sig, const Context& ctx);
void check_signature(const Signature& sig);
// Check Gamma |- s : target, padding s with identities on target's unbound variables.
void check_subst_typing(const Context& ctx, const Signature& sig, const Subst& s, const Context& target);
Context minimal_domain_context(const Subst& s, const Context& target, const Context& ambient);

// Canonical form of a well-typed (possibly non-canonical) term. Unannotated
// lambdas are accepted only where the expected type is known.
TermP normalize(const TermP& t, const Context& ctx, const Signature& sig);
// Canonical form of an object checked against a canonical family.
TermP normalize_at(const TermP& t, const TermP& type, const Context& ctx, const Signature& sig);
bool equal(const TermP& t1, const TermP& t2, const Context& ctx, const Signature& sig);

// Eta-long form of a head applied to a spine at the given remaining type.
TermP eta_expand(const TermP& app, const TermP& type);
TermP eta_var(const std::string& name, const TermP& type);

// Type of a canonical object in a context (the object must check).
TermP type_of(const Context& ctx, const Signature& sig, const TermP& m);

// Variables of `ctx` needed to type `seeds`: the dependency-closed subset, in context order.
std::vector<std::string> dependency_closure(const Context& ctx, const std::vector<std::string>& seeds);

// Fresh names of the form base#n from an explicit counter.
struct NameSupply {
  unsigned long next = 1;
  std::string fresh(const std::string& hint);
};
std::string name_base(const std::string& name);
// Numeric suffix after '#', or 0.
unsigned long name_suffix(const std::string& name);

}  // namespace lfm2
