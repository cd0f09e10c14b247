// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_UNIFY_HPP
#define UNSATCACHE_UNIFY_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "unsatcache/terms.hpp"

namespace unsatcache {

/// Traversal state for unification: free-variable bindings plus a stack
/// of temporary bound-variable correspondences. Entries pushed for a
/// binder shadow both the free bindings and outer bound pairs, and are
/// popped when its body has been traversed.
struct UnifyScope {
  Substitution current;
  std::vector<std::pair<Var, Var>> boundStack;
};

/// Computes the unifying substitution that makes `coreClause`
/// structurally equal to `formulaClause`, mapping free variables of the
/// core to free variables of the formula clause (sort-preserving,
/// possibly non-injective). Bound variables are matched positionally
/// and never appear in the result. Returns nullopt when the clauses do
/// not unify.
std::optional<Substitution> unify(const Clause& coreClause, const Clause& formulaClause);

/// All successful unifications of `coreClause` against `candidates`,
/// one row per success, in candidate order.
std::vector<std::pair<std::size_t, Substitution>> unifyMany(
    const Clause& coreClause, std::span<const Clause> candidates);

}  // namespace unsatcache

#endif
