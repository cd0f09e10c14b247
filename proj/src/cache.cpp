// SPDX-License-Identifier: Apache-2.0
#include "unsatcache/cache.hpp"

#include <algorithm>
#include <unordered_map>

#include "unsatcache/errors.hpp"

namespace unsatcache {

namespace {

std::string dedupKey(const std::vector<Clause>& clauses) {
  std::vector<std::string> parts;
  parts.reserve(clauses.size());
  for (const Clause& c : canonizeClauses(clauses)) parts.push_back(c.term().toString());
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const std::string& p : parts) {
    key += p;
    key += '\n';
  }
  return key;
}

}  // namespace

std::uint64_t UnsatCoreStore::insertCore(std::vector<Clause> clauses, std::string origin) {
  if (clauses.empty()) throw Error("cannot store an empty core");
  std::string key = dedupKey(clauses);
  if (auto it = dedup_.find(key); it != dedup_.end()) return it->second;

  UnsatCoreEntry entry;
  entry.id = entries_.size();
  entry.originFormula = std::move(origin);
  entry.clauseHashes.reserve(clauses.size());
  for (const Clause& c : clauses) {
    ClauseHash h = computeAstHash(c.term());
    entry.clauseHashes.push_back(h);
    entry.footprint.insert(h);
  }
  entry.bloom = toBloomBits(entry.footprint, width_);
  entry.clauses = std::move(clauses);

  dedup_.emplace(std::move(key), entry.id);
  entries_.push_back(std::move(entry));
  return entries_.back().id;
}

std::vector<const UnsatCoreEntry*> UnsatCoreStore::selectCandidates(const Formula& f) const {
  return selectCandidates(toBloomBits(computeFormulaHashFootprint(f), width_));
}

std::vector<const UnsatCoreEntry*> UnsatCoreStore::selectCandidates(
    const BloomBits& formulaBloom) const {
  std::vector<const UnsatCoreEntry*> out;
  for (const UnsatCoreEntry& entry : entries_)
    if (bloomSubset(entry.bloom, formulaBloom)) out.push_back(&entry);
  return out;
}

const UnsatCoreEntry* UnsatCoreStore::entry(std::uint64_t id) const {
  return id < entries_.size() ? &entries_[id] : nullptr;
}

void UnsatCoreStore::reset() {
  entries_.clear();
  dedup_.clear();
}

// ----------------------------------------------------------- canonization

namespace {

struct CanonizeState {
  std::size_t counter = 0;
  std::map<Var, std::string> freeMap;
  std::vector<std::pair<std::string, std::string>> boundScope;

  std::string nextName() { return "v" + std::to_string(counter++); }
};

Term canonizeRec(const Term& t, CanonizeState& state) {
  switch (t.kind()) {
    case TermKind::Constant:
      return t;
    case TermKind::Variable: {
      for (auto it = state.boundScope.rbegin(); it != state.boundScope.rend(); ++it)
        if (it->first == t.name()) return Term::variable(t.sort(), it->second);
      Var v{t.name(), t.sort()};
      auto [entry, inserted] = state.freeMap.emplace(v, "");
      if (inserted) entry->second = state.nextName();
      return Term::variable(t.sort(), entry->second);
    }
    case TermKind::Apply: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& arg : t.args()) args.push_back(canonizeRec(arg, state));
      return Term::apply(t.sort(), t.op(), t.opInterpreted(), std::move(args));
    }
    case TermKind::Binder: {
      std::vector<Var> bound;
      bound.reserve(t.boundVars().size());
      std::size_t pushed = 0;
      for (const Var& v : t.boundVars()) {
        std::string fresh = state.nextName();
        state.boundScope.emplace_back(v.name, fresh);
        ++pushed;
        bound.push_back(Var{std::move(fresh), v.sort});
      }
      Term body = canonizeRec(t.body(), state);
      state.boundScope.resize(state.boundScope.size() - pushed);
      return Term::binder(t.binderKind(), std::move(bound), std::move(body));
    }
  }
  return t;
}

}  // namespace

Canonized canonizeWithRenaming(const Formula& f) {
  CanonizeState state;
  Canonized result;
  result.formula.origin = f.origin;
  result.formula.clauses.reserve(f.clauses.size());
  for (const Clause& c : f.clauses)
    result.formula.clauses.emplace_back(canonizeRec(c.term(), state), c.label());
  for (const auto& [original, canonicalName] : state.freeMap)
    result.renaming.bind(original, Var{canonicalName, original.sort});
  return result;
}

Formula canonize(const Formula& f) { return canonizeWithRenaming(f).formula; }

std::vector<Clause> canonizeClauses(const std::vector<Clause>& clauses) {
  Formula f;
  f.clauses = clauses;
  return canonize(f).clauses;
}

// ------------------------------------------------------- candidate testing

CandidateOutcome testCandidateCachealot(const UnsatCoreEntry& entry, const Formula& f,
                                        const StrategyConfig& cfg, Deadline deadline,
                                        const ClauseBuckets* formulaBuckets) {
  auto tablesOpt =
      buildTables(entry.clauses, f, cfg.o1 ? formulaBuckets : nullptr);
  if (!tablesOpt) return {};
  std::vector<SubstitutionTable> tables = std::move(*tablesOpt);

  if (cfg.o2) {
    auto filtered = filterInvalid(std::move(tables));
    if (!filtered) return {};
    tables = std::move(filtered->tables);
  }

  if (cfg.o3) {
    JoinResult r = joinLazy(tables, deadline);
    return {r.status, std::move(r.substitution)};
  }

  BoundedJoinResult r = joinFullBounded(tables, deadline);
  if (r.status != JoinStatus::Found) return {r.status, {}};
  Substitution s;
  for (std::size_t c = 0; c < r.table.columns.size(); ++c)
    s.bind(r.table.columns[c], r.table.rows.front()[c]);
  return {JoinStatus::Found, std::move(s)};
}

namespace {

bool clausePresent(const std::unordered_map<std::uint64_t, std::vector<const Clause*>>& index,
                   const Clause& c) {
  auto it = index.find(c.structuralHash());
  if (it == index.end()) return false;
  for (const Clause* candidate : it->second)
    if (*candidate == c) return true;
  return false;
}

std::unordered_map<std::uint64_t, std::vector<const Clause*>> indexClauses(
    const std::vector<Clause>& clauses) {
  std::unordered_map<std::uint64_t, std::vector<const Clause*>> index;
  for (const Clause& c : clauses) index[c.structuralHash()].push_back(&c);
  return index;
}

}  // namespace

std::optional<Substitution> testCandidateUtopia(const UnsatCoreEntry& entry,
                                                const Formula& f,
                                                const StrategyConfig& cfg) {
  if (!cfg.canonize) {
    auto index = indexClauses(f.clauses);
    for (const Clause& c : entry.clauses)
      if (!clausePresent(index, c)) return std::nullopt;
    Substitution identity;
    for (const Clause& c : entry.clauses)
      for (const Var& v : c.freeVars())
        if (!identity.contains(v)) identity.bind(v, v);
    return identity;
  }

  Formula coreAsFormula;
  coreAsFormula.clauses = entry.clauses;
  Canonized core = canonizeWithRenaming(coreAsFormula);
  Canonized formula = canonizeWithRenaming(f);

  auto index = indexClauses(formula.formula.clauses);
  for (const Clause& c : core.formula.clauses)
    if (!clausePresent(index, c)) return std::nullopt;

  // Compose: core var -> canonical var -> original formula var.
  std::map<Var, Var> formulaFromCanonical;
  for (const auto& [original, canonical] : formula.renaming)
    formulaFromCanonical.emplace(canonical, original);
  Substitution composed;
  for (const auto& [coreVar, canonical] : core.renaming) {
    auto it = formulaFromCanonical.find(canonical);
    if (it == formulaFromCanonical.end()) return std::nullopt;  // collision safety
    composed.bind(coreVar, it->second);
  }
  return composed;
}

bool substitutionCovers(const UnsatCoreEntry& entry, const Substitution& s,
                        const Formula& f) {
  std::set<std::string> imageNames;
  for (const auto& [from, to] : s) {
    (void)from;
    imageNames.insert(to.name);
  }
  auto index = indexClauses(f.clauses);
  for (const Clause& c : entry.clauses) {
    Term safe = renameBindersAvoiding(c.term(), imageNames);
    Clause substituted(applySubstitution(safe, s));
    if (!clausePresent(index, substituted)) return false;
  }
  return true;
}

// ------------------------------------------------------------------ lookup

ReuseVerdict lookup(const UnsatCoreStore& store, const Formula& fRaw,
                    const StrategyConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const Deadline deadline = start + cfg.lookupDeadline;

  Formula canonized;
  const Formula* f = &fRaw;
  if (cfg.canonize) {
    canonized = canonize(fRaw);
    f = &canonized;
  }

  ReuseVerdict verdict;
  auto finish = [&](ReuseVerdict::Outcome outcome) {
    verdict.outcome = outcome;
    verdict.lookupTime = std::chrono::steady_clock::now() - start;
    return verdict;
  };

  BloomBits bloom = toBloomBits(computeFormulaHashFootprint(*f), store.bloomBits());
  std::vector<const UnsatCoreEntry*> candidates = store.selectCandidates(bloom);
  verdict.candidatesSelected = candidates.size();

  std::optional<ClauseBuckets> buckets;
  if (cfg.strategy == Strategy::CacheALot && cfg.o1 && !candidates.empty())
    buckets = groupClausesByHash(*f);

  bool timedOut = false;
  for (const UnsatCoreEntry* entry : candidates) {
    if (std::chrono::steady_clock::now() > deadline) {
      timedOut = true;
      break;
    }
    ++verdict.candidatesTested;

    std::optional<Substitution> hit;
    if (cfg.strategy == Strategy::CacheALot) {
      CandidateOutcome outcome =
          testCandidateCachealot(*entry, *f, cfg, deadline, buckets ? &*buckets : nullptr);
      if (outcome.status == JoinStatus::TimedOut) {
        timedOut = true;
        break;
      }
      if (outcome.status == JoinStatus::Found) hit = std::move(outcome.substitution);
    } else {
      hit = testCandidateUtopia(*entry, *f, cfg);
    }

    if (hit && substitutionCovers(*entry, *hit, *f)) {
      verdict.coreId = entry->id;
      verdict.substitution = std::move(*hit);
      return finish(ReuseVerdict::Outcome::HitUnsat);
    }
  }
  return finish(timedOut ? ReuseVerdict::Outcome::TimeoutMiss
                         : ReuseVerdict::Outcome::Miss);
}

std::uint64_t ingestCore(UnsatCoreStore& store, std::vector<Clause> clauses,
                         std::string origin, const StrategyConfig& cfg) {
  if (cfg.canonize) clauses = canonizeClauses(clauses);
  return store.insertCore(std::move(clauses), std::move(origin));
}

}  // namespace unsatcache
