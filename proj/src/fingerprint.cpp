// SPDX-License-Identifier: Apache-2.0
#include "unsatcache/fingerprint.hpp"

#include <algorithm>

#include "unsatcache/errors.hpp"

namespace unsatcache {

namespace {

const char* binderOperator(BinderKind kind) {
  switch (kind) {
    case BinderKind::Forall: return "forall";
    case BinderKind::Exists: return "exists";
    case BinderKind::Lambda: return "lambda";
  }
  return "?";
}

ClauseHash hashNode(const Term& t) {
  const ClauseHash sortHash = fnv1a64(t.sort().key());
  switch (t.kind()) {
    case TermKind::Constant:
      return combineHashes(sortHash, fnv1a64(t.value()));
    case TermKind::Variable:
      return sortHash;  // names deliberately ignored
    case TermKind::Apply: {
      ClauseHash h = combineHashes(combineHashes(sortHash, fnv1a64(t.op())),
                                   fnv1a64(static_cast<std::uint64_t>(t.args().size())));
      for (const Term& arg : t.args()) h = combineHashes(h, hashNode(arg));
      return h;
    }
    case TermKind::Binder: {
      ClauseHash h =
          combineHashes(combineHashes(sortHash, fnv1a64(binderOperator(t.binderKind()))),
                        fnv1a64(static_cast<std::uint64_t>(t.boundVars().size())));
      return combineHashes(h, hashNode(t.body()));
    }
  }
  return sortHash;
}

}  // namespace

ClauseHash computeAstHash(const Term& t) { return hashNode(t); }

bool HashFootprint::isSubsetOf(const HashFootprint& other) const {
  return std::includes(other.hashes_.begin(), other.hashes_.end(), hashes_.begin(),
                       hashes_.end());
}

HashFootprint computeFootprint(std::span<const Clause> clauses) {
  HashFootprint fp;
  for (const Clause& c : clauses) fp.insert(computeAstHash(c.term()));
  return fp;
}

HashFootprint computeFormulaHashFootprint(const Formula& f) {
  return computeFootprint(f.clauses);
}

BloomBits::BloomBits(unsigned n) : n_(n) {
  if (n < 1) throw Error("bloom width must be >= 1");
  words_.assign((n + 63) / 64, 0);
}

void BloomBits::set(ClauseHash h) {
  unsigned bit = static_cast<unsigned>(h % n_);
  words_[bit / 64] |= std::uint64_t{1} << (bit % 64);
}

bool BloomBits::test(unsigned bit) const {
  return (words_[bit / 64] >> (bit % 64)) & 1;
}

BloomBits toBloomBits(const HashFootprint& fp, unsigned n) {
  BloomBits bits(n);
  for (ClauseHash h : fp) bits.set(h);
  return bits;
}

bool bloomSubset(const BloomBits& core, const BloomBits& formula) {
  if (core.width() != formula.width())
    throw WidthMismatchError("bloom widths differ: " + std::to_string(core.width()) +
                             " vs " + std::to_string(formula.width()));
  auto cw = core.words();
  auto fw = formula.words();
  for (std::size_t i = 0; i < cw.size(); ++i)
    if ((cw[i] & ~fw[i]) != 0) return false;
  return true;
}

ClauseBuckets groupClausesByHash(const Formula& f) {
  ClauseBuckets buckets;
  for (std::size_t i = 0; i < f.clauses.size(); ++i)
    buckets[computeAstHash(f.clauses[i].term())].push_back(i);
  return buckets;
}

}  // namespace unsatcache
