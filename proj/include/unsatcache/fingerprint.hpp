// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_FINGERPRINT_HPP
#define UNSATCACHE_FINGERPRINT_HPP

#include <cstdint>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "unsatcache/hashing.hpp"
#include "unsatcache/terms.hpp"

namespace unsatcache {

/// Structural, variable-name-blind clause hash. Stable across runs and
/// platforms for equal term structure.
using ClauseHash = std::uint64_t;

/// Hashes an AST node: constants by sort and value, variables by sort
/// only (names ignored), applications by sort, operator and arity
/// followed by a left-to-right fold of the children. Binders hash their
/// kind as the operator and the bound-variable count as the arity.
ClauseHash computeAstHash(const Term& t);

/// Set of clause hashes of a formula; duplicates collapse.
class HashFootprint {
 public:
  HashFootprint() = default;
  explicit HashFootprint(std::set<ClauseHash> hashes) : hashes_(std::move(hashes)) {}

  void insert(ClauseHash h) { hashes_.insert(h); }
  bool contains(ClauseHash h) const { return hashes_.count(h) > 0; }
  std::size_t size() const { return hashes_.size(); }
  bool empty() const { return hashes_.empty(); }
  auto begin() const { return hashes_.begin(); }
  auto end() const { return hashes_.end(); }

  bool isSubsetOf(const HashFootprint& other) const;

  bool operator==(const HashFootprint& o) const { return hashes_ == o.hashes_; }

 private:
  std::set<ClauseHash> hashes_;
};

HashFootprint computeFootprint(std::span<const Clause> clauses);
HashFootprint computeFormulaHashFootprint(const Formula& f);

/// Fixed-width bitset projection of a footprint: bit (h mod n) is set
/// for every hash h.
class BloomBits {
 public:
  explicit BloomBits(unsigned n);

  unsigned width() const { return n_; }
  void set(ClauseHash h);
  bool test(unsigned bit) const;
  std::span<const std::uint64_t> words() const { return words_; }

  bool operator==(const BloomBits& o) const { return n_ == o.n_ && words_ == o.words_; }

 private:
  unsigned n_;
  std::vector<std::uint64_t> words_;
};

BloomBits toBloomBits(const HashFootprint& fp, unsigned n);

/// True iff every set bit of `core` is also set in `formula`; a single
/// pass of bitwise operations. Throws WidthMismatchError on differing
/// widths.
bool bloomSubset(const BloomBits& core, const BloomBits& formula);

/// O1 index: formula clause indices grouped by clause hash.
using ClauseBuckets = std::unordered_map<ClauseHash, std::vector<std::size_t>>;
ClauseBuckets groupClausesByHash(const Formula& f);

}  // namespace unsatcache

#endif
