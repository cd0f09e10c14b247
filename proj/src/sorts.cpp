// SPDX-License-Identifier: Apache-2.0
#include "unsatcache/sorts.hpp"

#include <utility>
#include <vector>

#include "unsatcache/errors.hpp"

namespace unsatcache {

struct Sort::Rep {
  SortKind kind;
  unsigned a = 0;  // BitVec width / FP ebits
  unsigned b = 0;  // FP sbits
  std::string name;
  std::vector<Sort> children;  // Array: [index, element]
  std::string key;
};

namespace {

std::shared_ptr<const Sort::Rep> makeRep(SortKind kind, unsigned a, unsigned b,
                                         std::string name, std::vector<Sort> children,
                                         std::string key) {
  auto rep = std::make_shared<Sort::Rep>();
  rep->kind = kind;
  rep->a = a;
  rep->b = b;
  rep->name = std::move(name);
  rep->children = std::move(children);
  rep->key = std::move(key);
  return rep;
}

const std::shared_ptr<const Sort::Rep>& boolRep() {
  static const auto rep = makeRep(SortKind::Bool, 0, 0, "", {}, "Bool");
  return rep;
}

const std::shared_ptr<const Sort::Rep>& intRep() {
  static const auto rep = makeRep(SortKind::Int, 0, 0, "", {}, "Int");
  return rep;
}

const std::shared_ptr<const Sort::Rep>& realRep() {
  static const auto rep = makeRep(SortKind::Real, 0, 0, "", {}, "Real");
  return rep;
}

}  // namespace

Sort Sort::boolean() { return Sort(boolRep()); }
Sort Sort::integer() { return Sort(intRep()); }
Sort Sort::real() { return Sort(realRep()); }

Sort Sort::bitVec(unsigned width) {
  if (width < 1) throw Error("bit-vector width must be >= 1");
  return Sort(makeRep(SortKind::BitVec, width, 0, "", {},
                      "(_ BitVec " + std::to_string(width) + ")"));
}

Sort Sort::floatingPoint(unsigned ebits, unsigned sbits) {
  if (ebits < 2 || sbits < 2) throw Error("floating-point sort needs ebits, sbits >= 2");
  return Sort(makeRep(SortKind::FloatingPoint, ebits, sbits, "", {},
                      "(_ FloatingPoint " + std::to_string(ebits) + " " +
                          std::to_string(sbits) + ")"));
}

Sort Sort::array(Sort index, Sort element) {
  std::string key = "(Array " + index.key() + " " + element.key() + ")";
  return Sort(makeRep(SortKind::Array, 0, 0, "", {std::move(index), std::move(element)},
                      std::move(key)));
}

Sort Sort::uninterpreted(std::string name) {
  if (name.empty()) throw Error("uninterpreted sort needs a name");
  std::string key = name;
  return Sort(makeRep(SortKind::Uninterpreted, 0, 0, std::move(name), {}, std::move(key)));
}

SortKind Sort::kind() const { return rep_->kind; }
unsigned Sort::bitWidth() const { return rep_->a; }
unsigned Sort::exponentBits() const { return rep_->a; }
unsigned Sort::significandBits() const { return rep_->b; }
const Sort& Sort::indexSort() const { return rep_->children[0]; }
const Sort& Sort::elementSort() const { return rep_->children[1]; }
const std::string& Sort::name() const { return rep_->name; }
const std::string& Sort::key() const { return rep_->key; }

bool Sort::operator==(const Sort& other) const {
  return rep_ == other.rep_ || rep_->key == other.rep_->key;
}

bool Sort::operator<(const Sort& other) const { return rep_->key < other.rep_->key; }

}  // namespace unsatcache
