// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_CACHE_HPP
#define UNSATCACHE_CACHE_HPP

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unsatcache/fingerprint.hpp"
#include "unsatcache/join.hpp"
#include "unsatcache/terms.hpp"

namespace unsatcache {

/// A stored unsat core eligible for reuse. Footprint, bloom bits and
/// per-clause hashes are derived from the clauses at insertion.
struct UnsatCoreEntry {
  std::vector<Clause> clauses;
  std::vector<ClauseHash> clauseHashes;
  HashFootprint footprint;
  BloomBits bloom;
  std::uint64_t id = 0;
  std::string originFormula;
};

enum class Strategy { CacheALot, Utopia };

struct StrategyConfig {
  Strategy strategy = Strategy::CacheALot;
  bool canonize = false;
  unsigned bloomBits = 1024;
  bool o1 = true;  // group formula clauses by hash
  bool o2 = true;  // filter invalid substitutions before joining
  bool o3 = true;  // lazy backtracking join
  std::chrono::nanoseconds lookupDeadline = std::chrono::milliseconds(100);
};

struct ReuseVerdict {
  enum class Outcome { HitUnsat, Miss, TimeoutMiss };
  Outcome outcome = Outcome::Miss;
  std::uint64_t coreId = 0;       // HitUnsat only
  Substitution substitution;      // HitUnsat only
  std::chrono::nanoseconds lookupTime{0};
  std::size_t candidatesSelected = 0;
  std::size_t candidatesTested = 0;
};

/// Store of unsat cores. Single writer, multiple concurrent readers;
/// entries are immutable once inserted.
class UnsatCoreStore {
 public:
  explicit UnsatCoreStore(unsigned bloomBits = 1024) : width_(bloomBits) {}

  /// Appends a core (footprint and bloom computed here). Structurally
  /// duplicate cores (equal canonized clause lists) return the existing
  /// id without growing the store.
  std::uint64_t insertCore(std::vector<Clause> clauses, std::string origin);

  /// Entries whose bloom bits pass the subset test against the
  /// formula's bloom bits, in ascending id order.
  std::vector<const UnsatCoreEntry*> selectCandidates(const Formula& f) const;
  std::vector<const UnsatCoreEntry*> selectCandidates(const BloomBits& formulaBloom) const;

  const std::vector<UnsatCoreEntry>& entries() const { return entries_; }
  const UnsatCoreEntry* entry(std::uint64_t id) const;
  std::size_t size() const { return entries_.size(); }
  unsigned bloomBits() const { return width_; }

  void reset();

 private:
  unsigned width_;
  std::vector<UnsatCoreEntry> entries_;
  std::map<std::string, std::uint64_t> dedup_;
};

/// Renames all variables to v0, v1, ... in first-occurrence order over
/// a left-to-right depth-first traversal of the clauses (binder-bound
/// variables are renamed along the way, which keeps the operation
/// total). Deterministic and idempotent.
Formula canonize(const Formula& f);

struct Canonized {
  Formula formula;
  Substitution renaming;  // original free variable -> canonical variable
};
Canonized canonizeWithRenaming(const Formula& f);

std::vector<Clause> canonizeClauses(const std::vector<Clause>& clauses);

struct CandidateOutcome {
  JoinStatus status = JoinStatus::Exhausted;
  Substitution substitution;  // Found only
};

/// Substitution-search testing: build tables (over O1 buckets when
/// given), O2-filter, then lazy or materializing join under the
/// deadline.
CandidateOutcome testCandidateCachealot(const UnsatCoreEntry& entry, const Formula& f,
                                        const StrategyConfig& cfg, Deadline deadline,
                                        const ClauseBuckets* formulaBuckets);

/// Canonization-based testing: with cfg.canonize, canonize both sides
/// and check literal clause containment, reporting the composition of
/// the two renamings; without it, literal containment with the
/// identity substitution.
std::optional<Substitution> testCandidateUtopia(const UnsatCoreEntry& entry,
                                                const Formula& f,
                                                const StrategyConfig& cfg);

/// Full lookup pipeline: canonize the formula when configured, select
/// candidates by bloom subset, test them in ascending id order under a
/// shared deadline, re-verify any hit by substitution application.
ReuseVerdict lookup(const UnsatCoreStore& store, const Formula& f,
                    const StrategyConfig& cfg);

/// insertCore with the engine-level canonize preprocessing applied when
/// the configuration asks for it.
std::uint64_t ingestCore(UnsatCoreStore& store, std::vector<Clause> clauses,
                         std::string origin, const StrategyConfig& cfg);

/// Soundness gate: true iff every substituted core clause is
/// structurally equal to some clause of the formula.
bool substitutionCovers(const UnsatCoreEntry& entry, const Substitution& s,
                        const Formula& f);

}  // namespace unsatcache

#endif
