// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_SMTLIB_HPP
#define UNSATCACHE_SMTLIB_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unsatcache/terms.hpp"

namespace unsatcache {

struct SortSignature {
  std::vector<Sort> argSorts;  // empty for constants
  Sort resultSort;
};

/// One parsed .smt2 file: declarations and assertions in source order,
/// exactly one check-sat.
struct QueryFile {
  std::string path;
  std::vector<std::string> declaredSorts;
  std::vector<std::pair<std::string, SortSignature>> declarations;
  std::vector<std::pair<std::optional<std::string>, Term>> assertions;
  std::optional<std::string> logicTag;
};

/// Ordered collection of query files; the cache lifetime unit.
struct Suite {
  std::string id;
  std::vector<QueryFile> files;
};

/// Parses the SMT-LIB 2 subset used by suite files. Supported commands:
/// set-logic, set-option/set-info (ignored), declare-sort (arity 0),
/// declare-const, declare-fun, assert (with optional (! e :named n)),
/// check-sat, get-unsat-core (ignored), exit. Terms may use let
/// (expanded eagerly), forall/exists, ite, and the core
/// Bool/Int/Real/BitVec/FP/Array operators. Throws ParseError or
/// UnsupportedFeatureError.
QueryFile parseQueryFile(std::string_view text, std::string path);

/// Concatenation of flattenConjunction over each assertion, in order;
/// assertion names become clause labels. Throws SortError for a
/// non-Bool assertion.
Formula toFormula(const QueryFile& q);

/// Valid SMT-LIB 2 text for the formula. With nameEveryClause, clause i
/// is asserted as (assert (! c :named ki)) and the script requests
/// unsat cores.
std::string printQuery(const Formula& f, bool nameEveryClause);

/// Loads every .smt2 file under dir (recursively), ordered
/// lexicographically by relative path. Throws IoError or
/// EmptySuiteError.
Suite loadSuite(const std::filesystem::path& dir);

}  // namespace unsatcache

#endif
