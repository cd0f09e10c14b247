// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_SORTS_HPP
#define UNSATCACHE_SORTS_HPP

#include <memory>
#include <string>

namespace unsatcache {

enum class SortKind {
  Bool,
  Int,
  Real,
  BitVec,
  FloatingPoint,
  Array,
  Uninterpreted,
};

/// Immutable, structurally compared SMT sort. Cheap to copy; the
/// canonical key string doubles as the SMT-LIB spelling and as the
/// byte encoding fed to the fingerprint hash.
class Sort {
 public:
  static Sort boolean();
  static Sort integer();
  static Sort real();
  static Sort bitVec(unsigned width);                        // width >= 1
  static Sort floatingPoint(unsigned ebits, unsigned sbits); // ebits, sbits >= 2
  static Sort array(Sort index, Sort element);
  static Sort uninterpreted(std::string name);

  SortKind kind() const;
  unsigned bitWidth() const;         // BitVec
  unsigned exponentBits() const;     // FloatingPoint
  unsigned significandBits() const;  // FloatingPoint
  const Sort& indexSort() const;     // Array
  const Sort& elementSort() const;   // Array
  const std::string& name() const;   // Uninterpreted

  /// Canonical encoding, e.g. "Int", "(_ BitVec 8)", "(Array Int Bool)".
  const std::string& key() const;

  bool operator==(const Sort& other) const;
  bool operator!=(const Sort& other) const { return !(*this == other); }
  bool operator<(const Sort& other) const;

 private:
  struct Rep;
  explicit Sort(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

}  // namespace unsatcache

#endif
