// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_JOIN_HPP
#define UNSATCACHE_JOIN_HPP

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "unsatcache/fingerprint.hpp"
#include "unsatcache/terms.hpp"

namespace unsatcache {

/// Relation of candidate variable assignments for one core clause:
/// columns are the clause's free variables (first-occurrence order),
/// each row assigns one formula variable per column. Rows are
/// duplicate-free and sort-consistent column-wise.
struct SubstitutionTable {
  std::vector<Var> columns;
  std::vector<std::vector<Var>> rows;
  std::size_t sourceClauseIndex = 0;
};

/// Per-variable admissible image sets: the intersection, over all core
/// clauses containing the variable, of the values it takes in that
/// clause's table.
struct VariableDomain {
  std::map<Var, std::set<Var>> perVariable;
};

/// One table per core clause, rows gathered by unifying against the
/// formula clauses sharing the clause's hash (via `buckets` when given,
/// all clauses otherwise). Returns nullopt when any table is empty.
std::optional<std::vector<SubstitutionTable>> buildTables(std::span<const Clause> core,
                                                          const Formula& formula,
                                                          const ClauseBuckets* buckets);

struct FilteredTables {
  std::vector<SubstitutionTable> tables;
  VariableDomain domains;
};

/// O2: intersects per-variable domains across tables and deletes rows
/// with out-of-domain values, repeated to a fixed point. Returns
/// nullopt when a domain or table empties.
std::optional<FilteredTables> filterInvalid(std::vector<SubstitutionTable> tables);

using Deadline = std::chrono::steady_clock::time_point;

enum class JoinStatus { Found, Exhausted, TimedOut };

struct JoinResult {
  JoinStatus status = JoinStatus::Exhausted;
  Substitution substitution;        // meaningful when status == Found
  std::uint64_t rowsVisited = 0;    // partial-assignment extensions tried
};

/// O3: depth-first backtracking join over the tables (ascending row
/// count, ties by core clause index). Returns the first combined
/// substitution, Exhausted when none exists, or TimedOut when the
/// deadline expires; the deadline is checked at every row extension and
/// a hit found exactly at the deadline is still returned.
JoinResult joinLazy(std::span<const SubstitutionTable> tables, Deadline deadline);

/// Materializes the complete natural join (golden/oracle support; the
/// lookup path uses joinLazy or joinFullBounded instead).
SubstitutionTable joinFull(std::span<const SubstitutionTable> tables);

struct BoundedJoinResult {
  JoinStatus status = JoinStatus::Exhausted;
  SubstitutionTable table;
  std::uint64_t rowsMaterialized = 0;
};

/// Materializing join with a deadline check on every appended row; used
/// on the lookup path when lazy joining is disabled.
BoundedJoinResult joinFullBounded(std::span<const SubstitutionTable> tables,
                                  Deadline deadline);

/// Independent oracle for the existence of a complete substitution:
/// enumerates all sort-respecting maps from core variables to formula
/// variables and returns the first one under which every substituted
/// core clause appears among the formula's clauses. Throws
/// SizeGuardError beyond 6 core / 8 formula variables.
std::optional<Substitution> bruteForceComplete(std::span<const Clause> core,
                                               const Formula& formula);

}  // namespace unsatcache

#endif
