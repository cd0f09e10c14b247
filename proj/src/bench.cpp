// SPDX-License-Identifier: Apache-2.0
#include "unsatcache/bench.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "unsatcache/errors.hpp"

namespace unsatcache {

RunResult runSuite(const Suite& suite, SolverBackend& solver, const RunConfig& cfg) {
  RunResult result;
  result.metrics.suiteId = suite.id;
  UnsatCoreStore store(cfg.strategy.bloomBits);

  for (const QueryFile& qf : suite.files) {
    Formula f = toFormula(qf);
    FileOutcome outcome;
    outcome.path = qf.path;
    ++result.metrics.formulaCount;

    if (cfg.mode != RunMode::NoCache) {
      StrategyConfig strategy = cfg.strategy;
      strategy.strategy =
          cfg.mode == RunMode::Utopia ? Strategy::Utopia : Strategy::CacheALot;
      outcome.verdict = lookup(store, f, strategy);
      result.metrics.lookupOverheadNanos += outcome.verdict.lookupTime.count();

      if (outcome.verdict.outcome == ReuseVerdict::Outcome::HitUnsat) {
        outcome.status = FileOutcome::Status::CachedUnsat;
        outcome.cacheHit = true;
        ++result.metrics.cacheHits;

        if (cfg.audit) {
          const UnsatCoreEntry* entry = store.entry(outcome.verdict.coreId);
          Formula tested = strategy.canonize ? canonize(f) : f;
          if (!entry ||
              !substitutionCovers(*entry, outcome.verdict.substitution, tested))
            result.findings.push_back(
                {qf.path, "hit substitution fails the containment check"});
          try {
            SolveResult audit = solver.solve(f, cfg.solverTimeout);
            result.metrics.timeSavedNanos += audit.solveTime.count();
            if (audit.status != SolveResult::Status::Unsat)
              result.findings.push_back(
                  {qf.path, "cache reported unsat but the solver did not"});
          } catch (const SolverCrashError& e) {
            result.findings.push_back({qf.path, std::string("audit solve crashed: ") +
                                                    e.what()});
          }
        }
        result.files.push_back(std::move(outcome));
        continue;
      }
    }

    SolveResult solved;
    try {
      solved = solver.solve(f, cfg.solverTimeout);
    } catch (const SolverCrashError&) {
      ++result.metrics.unknownCount;
      outcome.status = FileOutcome::Status::Unknown;
      result.files.push_back(std::move(outcome));
      continue;
    }
    result.metrics.solverNanos += solved.solveTime.count();

    switch (solved.status) {
      case SolveResult::Status::Sat:
        ++result.metrics.satCount;
        outcome.status = FileOutcome::Status::Sat;
        break;
      case SolveResult::Status::Unknown:
        ++result.metrics.unknownCount;
        outcome.status = FileOutcome::Status::Unknown;
        break;
      case SolveResult::Status::Unsat: {
        ++result.metrics.unsatCount;
        result.metrics.unsatSolverNanos += solved.solveTime.count();
        outcome.status = FileOutcome::Status::Unsat;
        if (cfg.mode != RunMode::NoCache) {
          std::vector<std::size_t> indices = solved.coreClauseIndices;
          if (indices.empty())
            for (std::size_t i = 0; i < f.clauses.size(); ++i) indices.push_back(i);
          std::vector<Clause> core;
          core.reserve(indices.size());
          for (std::size_t i : indices)
            if (i < f.clauses.size()) core.push_back(f.clauses[i]);
          if (!core.empty()) ingestCore(store, std::move(core), f.origin, cfg.strategy);
        }
        break;
      }
    }
    result.files.push_back(std::move(outcome));
  }

  SuiteMetrics& m = result.metrics;
  const std::size_t finallyUnsat = m.cacheHits + m.unsatCount;
  if (finallyUnsat > 0)
    m.unsatReuseRatio = 100.0 * static_cast<double>(m.cacheHits) /
                        static_cast<double>(finallyUnsat);
  if (m.formulaCount > 0)
    m.overallReuseRatio = 100.0 * static_cast<double>(m.cacheHits) /
                          static_cast<double>(m.formulaCount);
  const std::int64_t unsatBaseline = m.timeSavedNanos + m.unsatSolverNanos;
  if (unsatBaseline > 0)
    m.timeSavedOnUnsatRatio = 100.0 * static_cast<double>(m.timeSavedNanos) /
                              static_cast<double>(unsatBaseline);
  return result;
}

RunResult runAudit(const Suite& suite, SolverBackend& solver, RunConfig cfg) {
  cfg.audit = true;
  return runSuite(suite, solver, cfg);
}

namespace {

nlohmann::ordered_json metricsJson(const SuiteMetrics& m, const ReportConfigEcho& echo) {
  nlohmann::ordered_json j;
  j["suite"] = m.suiteId;
  j["formulas"] = m.formulaCount;
  j["sat"] = m.satCount;
  j["unsat"] = m.unsatCount;
  j["unknown"] = m.unknownCount;
  j["cache_hits"] = m.cacheHits;
  j["unsat_reuse_ratio"] = m.unsatReuseRatio;
  j["overall_reuse_ratio"] = m.overallReuseRatio;
  j["lookup_overhead_ns"] = m.lookupOverheadNanos;
  j["solver_ns"] = m.solverNanos;
  j["unsat_solver_ns"] = m.unsatSolverNanos;
  j["time_saved_ns"] = m.timeSavedNanos;
  j["time_saved_on_unsat_ratio"] = m.timeSavedOnUnsatRatio;
  j["mode"] = echo.mode;
  j["canonize"] = echo.canonize;
  j["bloom_bits"] = echo.bloomBits;
  j["o1"] = echo.o1;
  j["o2"] = echo.o2;
  j["o3"] = echo.o3;
  j["lookup_timeout_ms"] = echo.lookupTimeoutMs;
  j["audit"] = echo.audit;
  return j;
}

}  // namespace

void emitReport(const std::vector<SuiteMetrics>& metrics, const ReportConfigEcho& echo,
                ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const SuiteMetrics& m : metrics) arr.push_back(metricsJson(m, echo));
    out << arr.dump(2) << "\n";
    return;
  }
  out << "suite,formulas,sat,unsat,unknown,cache_hits,unsat_reuse_ratio,"
         "overall_reuse_ratio,lookup_overhead_ns,solver_ns,unsat_solver_ns,"
         "time_saved_ns,time_saved_on_unsat_ratio,mode,canonize,bloom_bits,"
         "o1,o2,o3,lookup_timeout_ms,audit\n";
  for (const SuiteMetrics& m : metrics) {
    std::ostringstream row;
    row << m.suiteId << ',' << m.formulaCount << ',' << m.satCount << ',' << m.unsatCount
        << ',' << m.unknownCount << ',' << m.cacheHits << ',' << m.unsatReuseRatio << ','
        << m.overallReuseRatio << ',' << m.lookupOverheadNanos << ',' << m.solverNanos
        << ',' << m.unsatSolverNanos << ',' << m.timeSavedNanos << ','
        << m.timeSavedOnUnsatRatio << ',' << echo.mode << ','
        << (echo.canonize ? "on" : "off") << ',' << echo.bloomBits << ','
        << (echo.o1 ? "on" : "off") << ',' << (echo.o2 ? "on" : "off") << ','
        << (echo.o3 ? "on" : "off") << ',' << echo.lookupTimeoutMs << ','
        << (echo.audit ? "on" : "off") << '\n';
    out << row.str();
  }
}

void emitReport(const std::vector<SuiteMetrics>& metrics, const ReportConfigEcho& echo,
                ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report to " + path.string());
  emitReport(metrics, echo, format, out);
}

}  // namespace unsatcache
