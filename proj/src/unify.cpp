// SPDX-License-Identifier: Apache-2.0
#include "unsatcache/unify.hpp"

namespace unsatcache {

namespace {

// Innermost bound-stack entry whose core (resp. formula) name matches,
// as an absolute stack index.
std::optional<std::size_t> resolveCore(const UnifyScope& scope, const std::string& name) {
  for (std::size_t i = scope.boundStack.size(); i-- > 0;)
    if (scope.boundStack[i].first.name == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> resolveFormula(const UnifyScope& scope, const std::string& name) {
  for (std::size_t i = scope.boundStack.size(); i-- > 0;)
    if (scope.boundStack[i].second.name == name) return i;
  return std::nullopt;
}

bool unifyRec(const Term& core, const Term& target, UnifyScope& scope) {
  if (core.kind() != target.kind()) return false;
  if (core.sort() != target.sort()) return false;
  switch (core.kind()) {
    case TermKind::Constant:
      return core.value() == target.value();
    case TermKind::Variable: {
      auto coreLevel = resolveCore(scope, core.name());
      auto targetLevel = resolveFormula(scope, target.name());
      if (coreLevel.has_value() != targetLevel.has_value()) return false;
      if (coreLevel) return *coreLevel == *targetLevel;
      Var from{core.name(), core.sort()};
      Var to{target.name(), target.sort()};
      if (const Var* bound = scope.current.lookup(from)) return *bound == to;
      scope.current.bind(from, to);
      return true;
    }
    case TermKind::Apply: {
      if (core.op() != target.op() || core.opInterpreted() != target.opInterpreted())
        return false;
      if (core.args().size() != target.args().size()) return false;
      for (std::size_t i = 0; i < core.args().size(); ++i)
        if (!unifyRec(core.args()[i], target.args()[i], scope)) return false;
      return true;
    }
    case TermKind::Binder: {
      if (core.binderKind() != target.binderKind()) return false;
      if (core.boundVars().size() != target.boundVars().size()) return false;
      for (std::size_t i = 0; i < core.boundVars().size(); ++i)
        if (core.boundVars()[i].sort != target.boundVars()[i].sort) return false;
      std::size_t before = scope.boundStack.size();
      for (std::size_t i = 0; i < core.boundVars().size(); ++i)
        scope.boundStack.emplace_back(core.boundVars()[i], target.boundVars()[i]);
      bool ok = unifyRec(core.body(), target.body(), scope);
      scope.boundStack.resize(before);
      return ok;
    }
  }
  return false;
}

}  // namespace

std::optional<Substitution> unify(const Clause& coreClause, const Clause& formulaClause) {
  UnifyScope scope;
  if (!unifyRec(coreClause.term(), formulaClause.term(), scope)) return std::nullopt;
  return scope.current;
}

std::vector<std::pair<std::size_t, Substitution>> unifyMany(
    const Clause& coreClause, std::span<const Clause> candidates) {
  std::vector<std::pair<std::size_t, Substitution>> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (auto s = unify(coreClause, candidates[i])) out.emplace_back(i, std::move(*s));
  return out;
}

}  // namespace unsatcache
