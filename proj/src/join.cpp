// SPDX-License-Identifier: Apache-2.0
#include "unsatcache/join.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "unsatcache/errors.hpp"
#include "unsatcache/unify.hpp"

namespace unsatcache {

std::optional<std::vector<SubstitutionTable>> buildTables(std::span<const Clause> core,
                                                          const Formula& formula,
                                                          const ClauseBuckets* buckets) {
  std::vector<SubstitutionTable> tables;
  tables.reserve(core.size());
  for (std::size_t ci = 0; ci < core.size(); ++ci) {
    const Clause& coreClause = core[ci];
    SubstitutionTable table;
    table.columns = coreClause.freeVars();
    table.sourceClauseIndex = ci;

    std::set<std::vector<Var>> seen;
    auto addRowFor = [&](const Clause& candidate) {
      auto s = unify(coreClause, candidate);
      if (!s) return;
      std::vector<Var> row;
      row.reserve(table.columns.size());
      for (const Var& col : table.columns) row.push_back(*s->lookup(col));
      if (seen.insert(row).second) table.rows.push_back(std::move(row));
    };

    if (buckets) {
      auto it = buckets->find(computeAstHash(coreClause.term()));
      if (it != buckets->end())
        for (std::size_t idx : it->second) addRowFor(formula.clauses[idx]);
    } else {
      for (const Clause& candidate : formula.clauses) addRowFor(candidate);
    }

    if (table.rows.empty()) return std::nullopt;
    tables.push_back(std::move(table));
  }
  return tables;
}

std::optional<FilteredTables> filterInvalid(std::vector<SubstitutionTable> tables) {
  VariableDomain domains;
  bool changed = true;
  while (changed) {
    changed = false;

    domains.perVariable.clear();
    for (const SubstitutionTable& table : tables) {
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        std::set<Var> values;
        for (const auto& row : table.rows) values.insert(row[c]);
        auto [it, inserted] = domains.perVariable.emplace(table.columns[c], values);
        if (!inserted) {
          std::set<Var> intersection;
          std::set_intersection(it->second.begin(), it->second.end(), values.begin(),
                                values.end(),
                                std::inserter(intersection, intersection.begin()));
          it->second = std::move(intersection);
        }
        if (it->second.empty()) return std::nullopt;
      }
    }

    for (SubstitutionTable& table : tables) {
      auto outOfDomain = [&](const std::vector<Var>& row) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
          if (domains.perVariable.at(table.columns[c]).count(row[c]) == 0) return true;
        return false;
      };
      std::size_t before = table.rows.size();
      std::erase_if(table.rows, outOfDomain);
      if (table.rows.empty()) return std::nullopt;
      if (table.rows.size() != before) changed = true;
    }
  }
  return FilteredTables{std::move(tables), std::move(domains)};
}

namespace {

std::vector<std::size_t> tableOrder(std::span<const SubstitutionTable> tables) {
  std::vector<std::size_t> order(tables.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (tables[a].rows.size() != tables[b].rows.size())
      return tables[a].rows.size() < tables[b].rows.size();
    return tables[a].sourceClauseIndex < tables[b].sourceClauseIndex;
  });
  return order;
}

class LazyJoiner {
 public:
  LazyJoiner(std::span<const SubstitutionTable> tables, Deadline deadline)
      : tables_(tables), order_(tableOrder(tables)), deadline_(deadline) {}

  JoinResult run() {
    JoinResult result;
    result.status = search(0, result);
    if (result.status == JoinStatus::Found) {
      for (const auto& [var, image] : assignment_) result.substitution.bind(var, image);
    }
    return result;
  }

 private:
  JoinStatus search(std::size_t level, JoinResult& result) {
    if (level == order_.size()) return JoinStatus::Found;
    const SubstitutionTable& table = tables_[order_[level]];
    for (const auto& row : table.rows) {
      if (std::chrono::steady_clock::now() > deadline_) return JoinStatus::TimedOut;
      ++result.rowsVisited;
      std::vector<const Var*> added;
      if (tryExtend(table, row, added)) {
        JoinStatus status = search(level + 1, result);
        if (status != JoinStatus::Exhausted) return status;
      }
      for (const Var* col : added) assignment_.erase(*col);
    }
    return JoinStatus::Exhausted;
  }

  bool tryExtend(const SubstitutionTable& table, const std::vector<Var>& row,
                 std::vector<const Var*>& added) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      auto it = assignment_.find(table.columns[c]);
      if (it != assignment_.end() && it->second != row[c]) return false;
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      auto [it, inserted] = assignment_.emplace(table.columns[c], row[c]);
      (void)it;
      if (inserted) added.push_back(&table.columns[c]);
    }
    return true;
  }

  std::span<const SubstitutionTable> tables_;
  std::vector<std::size_t> order_;
  Deadline deadline_;
  std::map<Var, Var> assignment_;
};

std::vector<Var> joinColumns(const SubstitutionTable& left, const SubstitutionTable& right,
                             std::vector<std::pair<std::size_t, std::size_t>>& shared,
                             std::vector<std::size_t>& rightNew) {
  std::vector<Var> columns = left.columns;
  for (std::size_t rc = 0; rc < right.columns.size(); ++rc) {
    auto it = std::find(left.columns.begin(), left.columns.end(), right.columns[rc]);
    if (it != left.columns.end()) {
      shared.emplace_back(static_cast<std::size_t>(it - left.columns.begin()), rc);
    } else {
      rightNew.push_back(rc);
      columns.push_back(right.columns[rc]);
    }
  }
  return columns;
}

// Joins two tables row by row, calling emit for every joined row.
// Returns false when emit requested a stop.
bool joinPairwise(const SubstitutionTable& left, const SubstitutionTable& right,
                  const std::vector<std::pair<std::size_t, std::size_t>>& shared,
                  const std::vector<std::size_t>& rightNew,
                  const std::function<bool(std::vector<Var>)>& emit) {
  for (const auto& lrow : left.rows) {
    for (const auto& rrow : right.rows) {
      bool match = true;
      for (const auto& [lc, rc] : shared) {
        if (lrow[lc] != rrow[rc]) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      std::vector<Var> row = lrow;
      for (std::size_t rc : rightNew) row.push_back(rrow[rc]);
      if (!emit(std::move(row))) return false;
    }
  }
  return true;
}

}  // namespace

JoinResult joinLazy(std::span<const SubstitutionTable> tables, Deadline deadline) {
  return LazyJoiner(tables, deadline).run();
}

SubstitutionTable joinFull(std::span<const SubstitutionTable> tables) {
  if (tables.empty()) return {};
  SubstitutionTable acc = tables[0];
  for (std::size_t i = 1; i < tables.size(); ++i) {
    std::vector<std::pair<std::size_t, std::size_t>> shared;
    std::vector<std::size_t> rightNew;
    SubstitutionTable next;
    next.columns = joinColumns(acc, tables[i], shared, rightNew);
    next.sourceClauseIndex = acc.sourceClauseIndex;
    std::set<std::vector<Var>> seen;
    joinPairwise(acc, tables[i], shared, rightNew, [&](std::vector<Var> row) {
      if (seen.insert(row).second) next.rows.push_back(std::move(row));
      return true;
    });
    acc = std::move(next);
  }
  return acc;
}

BoundedJoinResult joinFullBounded(std::span<const SubstitutionTable> tables,
                                  Deadline deadline) {
  BoundedJoinResult result;
  if (tables.empty()) return result;
  SubstitutionTable acc = tables[0];
  for (std::size_t i = 1; i < tables.size(); ++i) {
    std::vector<std::pair<std::size_t, std::size_t>> shared;
    std::vector<std::size_t> rightNew;
    SubstitutionTable next;
    next.columns = joinColumns(acc, tables[i], shared, rightNew);
    next.sourceClauseIndex = acc.sourceClauseIndex;
    bool completed =
        joinPairwise(acc, tables[i], shared, rightNew, [&](std::vector<Var> row) {
          if (std::chrono::steady_clock::now() > deadline) return false;
          ++result.rowsMaterialized;
          next.rows.push_back(std::move(row));
          return true;
        });
    if (!completed) {
      result.status = JoinStatus::TimedOut;
      return result;
    }
    if (next.rows.empty()) {
      result.status = JoinStatus::Exhausted;
      return result;
    }
    acc = std::move(next);
  }
  result.status = acc.rows.empty() ? JoinStatus::Exhausted : JoinStatus::Found;
  result.table = std::move(acc);
  return result;
}

namespace {

std::vector<Var> firstOccurrenceVars(std::span<const Clause> clauses) {
  std::set<Var> seen;
  std::vector<Var> out;
  for (const Clause& c : clauses)
    for (const Var& v : c.freeVars())
      if (seen.insert(v).second) out.push_back(v);
  return out;
}

}  // namespace

std::optional<Substitution> bruteForceComplete(std::span<const Clause> core,
                                               const Formula& formula) {
  const std::vector<Var> coreVars = firstOccurrenceVars(core);
  const std::vector<Var> formulaVars =
      firstOccurrenceVars(std::span<const Clause>(formula.clauses));
  if (coreVars.size() > 6 || formulaVars.size() > 8)
    throw SizeGuardError("brute-force limits exceeded: " + std::to_string(coreVars.size()) +
                         " core vars, " + std::to_string(formulaVars.size()) +
                         " formula vars");

  // Sort-respecting candidate images per core variable.
  std::vector<std::vector<Var>> candidates(coreVars.size());
  for (std::size_t i = 0; i < coreVars.size(); ++i) {
    for (const Var& fv : formulaVars)
      if (fv.sort == coreVars[i].sort) candidates[i].push_back(fv);
    if (candidates[i].empty()) return std::nullopt;
  }

  // Freshen core binders so applying any image set cannot capture.
  std::set<std::string> forbidden;
  for (const Var& fv : formulaVars) forbidden.insert(fv.name);
  std::vector<Clause> freshCore;
  freshCore.reserve(core.size());
  for (const Clause& c : core)
    freshCore.emplace_back(renameBindersAvoiding(c.term(), forbidden), c.label());

  std::unordered_map<std::uint64_t, std::vector<const Clause*>> formulaIndex;
  for (const Clause& c : formula.clauses) formulaIndex[c.structuralHash()].push_back(&c);
  auto present = [&](const Clause& c) {
    auto it = formulaIndex.find(c.structuralHash());
    if (it == formulaIndex.end()) return false;
    for (const Clause* candidate : it->second)
      if (*candidate == c) return true;
    return false;
  };

  // A clause is checkable once every variable it mentions is assigned,
  // i.e. at the level of its last core variable.
  std::vector<std::vector<std::size_t>> checkAtLevel(coreVars.size());
  for (std::size_t ci = 0; ci < freshCore.size(); ++ci) {
    if (freshCore[ci].freeVars().empty()) {
      if (!present(freshCore[ci])) return std::nullopt;
      continue;
    }
    std::size_t last = 0;
    for (const Var& v : freshCore[ci].freeVars()) {
      auto it = std::find(coreVars.begin(), coreVars.end(), v);
      last = std::max(last, static_cast<std::size_t>(it - coreVars.begin()));
    }
    checkAtLevel[last].push_back(ci);
  }

  if (coreVars.empty()) return Substitution{};

  Substitution assignment;
  std::function<std::optional<Substitution>(std::size_t)> enumerate =
      [&](std::size_t level) -> std::optional<Substitution> {
    if (level == coreVars.size()) return assignment;
    for (const Var& image : candidates[level]) {
      assignment.bind(coreVars[level], image);
      bool ok = true;
      for (std::size_t ci : checkAtLevel[level]) {
        if (!present(applySubstitution(freshCore[ci], assignment))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        if (auto found = enumerate(level + 1)) return found;
      }
    }
    return std::nullopt;
  };
  return enumerate(0);
}

}  // namespace unsatcache
