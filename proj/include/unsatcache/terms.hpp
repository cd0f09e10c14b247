// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_TERMS_HPP
#define UNSATCACHE_TERMS_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "unsatcache/sorts.hpp"

namespace unsatcache {

enum class TermKind { Constant, Variable, Apply, Binder };
enum class BinderKind { Forall, Exists, Lambda };

/// A variable handle: name plus sort. Free-variable identity is the
/// (name, sort) pair; bound variables are matched positionally instead
/// (see Term::operator==).
struct Var {
  std::string name;
  Sort sort;

  bool operator==(const Var& o) const { return name == o.name && sort == o.sort; }
  bool operator!=(const Var& o) const { return !(*this == o); }
  bool operator<(const Var& o) const {
    if (name != o.name) return name < o.name;
    return sort < o.sort;
  }
};

/// Immutable term AST. Handles are cheap shared references; all
/// construction goes through the static factories, which enforce the
/// shape invariants (non-empty argument lists, distinct bound names).
///
/// Structural equality compares constants by canonical value, free
/// variables by name and sort, and binder-bound variables by position,
/// so alpha-variants of bound names compare equal while free names are
/// significant.
class Term {
 public:
  static Term constant(Sort sort, std::string value);
  static Term variable(Sort sort, std::string name);
  static Term apply(Sort sort, std::string op, bool interpreted, std::vector<Term> args);
  static Term binder(BinderKind kind, std::vector<Var> bound, Term body);

  TermKind kind() const;
  const Sort& sort() const;

  const std::string& value() const;  // Constant
  const std::string& name() const;   // Variable

  const std::string& op() const;  // Apply
  bool opInterpreted() const;     // Apply
  std::span<const Term> args() const;

  BinderKind binderKind() const;          // Binder
  std::span<const Var> boundVars() const; // Binder
  const Term& body() const;               // Binder

  bool operator==(const Term& other) const;
  bool operator!=(const Term& other) const { return !(*this == other); }

  /// Hash consistent with operator== (positional for bound variables,
  /// name-sensitive for free ones). O(size of term).
  std::uint64_t structuralHash() const;

  /// SMT-LIB s-expression spelling of the term.
  std::string toString() const;

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Sort-preserving variable-to-variable mapping. Images need not be
/// distinct; binding a pair with differing sorts throws SortError.
class Substitution {
 public:
  Substitution() = default;
  static Substitution of(std::initializer_list<std::pair<Var, Var>> pairs);

  void bind(const Var& from, const Var& to);
  const Var* lookup(const Var& v) const;
  bool contains(const Var& v) const { return lookup(v) != nullptr; }

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  auto begin() const { return map_.begin(); }
  auto end() const { return map_.end(); }

  bool operator==(const Substitution& o) const { return map_ == o.map_; }
  bool operator!=(const Substitution& o) const { return !(*this == o); }

  std::string toString() const;

 private:
  std::map<Var, Var> map_;
};

/// One top-level conjunct of a formula. Free variables are recorded in
/// first-occurrence order; the optional label carries the assertion
/// name for unsat-core mapping.
class Clause {
 public:
  explicit Clause(Term term, std::optional<std::string> label = std::nullopt);

  const Term& term() const { return term_; }
  const std::vector<Var>& freeVars() const { return freeVars_; }
  const std::optional<std::string>& label() const { return label_; }
  std::uint64_t structuralHash() const { return hash_; }

  bool operator==(const Clause& o) const {
    return hash_ == o.hash_ && term_ == o.term_;
  }
  bool operator!=(const Clause& o) const { return !(*this == o); }

 private:
  Term term_;
  std::vector<Var> freeVars_;
  std::optional<std::string> label_;
  std::uint64_t hash_;
};

struct Formula {
  std::vector<Clause> clauses;
  std::string origin;
};

/// Splits top-level conjunctions into clauses, left to right. A
/// non-conjunction root yields a single clause.
std::vector<Clause> flattenConjunction(const Term& root);

/// Free variables in first-occurrence order under binder shadowing
/// (an occurrence is bound when any enclosing binder binds its name).
std::vector<Var> freeVariables(const Term& t);

Term applySubstitution(const Term& t, const Substitution& s);

/// Replaces free variables by their images; bound occurrences are left
/// alone. Throws CaptureError when an image name collides with a bound
/// name enclosing a replaced occurrence.
Clause applySubstitution(const Clause& c, const Substitution& s);

/// Free-variable renaming; throws NonInjectiveError when the mapping is
/// not injective on the clause's free variables.
Clause alphaRenameFree(const Clause& c, const Substitution& bijection);

/// Renames every binder-bound variable to a fresh name outside
/// `forbidden`. The result is structurally equal to the input (bound
/// names are positional); use before applySubstitution when images may
/// collide with bound names.
Term renameBindersAvoiding(const Term& t, const std::set<std::string>& forbidden);

}  // namespace unsatcache

#endif
