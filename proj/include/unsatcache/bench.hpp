// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_BENCH_HPP
#define UNSATCACHE_BENCH_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "unsatcache/cache.hpp"
#include "unsatcache/smtlib.hpp"
#include "unsatcache/solver.hpp"

namespace unsatcache {

struct SuiteMetrics {
  std::string suiteId;
  std::size_t formulaCount = 0;
  std::size_t satCount = 0;      // solver-proven sat
  std::size_t unsatCount = 0;    // solver-proven unsat (misses)
  std::size_t unknownCount = 0;
  std::size_t cacheHits = 0;     // formulae resolved unsat from the cache
  double unsatReuseRatio = 0.0;  // % of finally-unsat formulae resolved from cache
  double overallReuseRatio = 0.0;
  std::int64_t lookupOverheadNanos = 0;  // all lookups, hits and misses
  std::int64_t solverNanos = 0;
  std::int64_t unsatSolverNanos = 0;
  std::int64_t timeSavedNanos = 0;  // audit mode: audited solve time of hits
  double timeSavedOnUnsatRatio = 0.0;
};

enum class RunMode { CacheALot, Utopia, NoCache };

struct RunConfig {
  RunMode mode = RunMode::CacheALot;
  StrategyConfig strategy;
  bool audit = false;
  std::chrono::nanoseconds solverTimeout = std::chrono::seconds(30);
};

struct FileOutcome {
  enum class Status { Sat, Unsat, Unknown, CachedUnsat };
  std::string path;
  Status status = Status::Unknown;
  bool cacheHit = false;
  ReuseVerdict verdict;  // not meaningful in nocache mode
};

struct AuditFinding {
  std::string path;
  std::string reason;
};

struct RunResult {
  SuiteMetrics metrics;
  std::vector<FileOutcome> files;
  std::vector<AuditFinding> findings;  // unsound hits; expected empty
};

/// Replays a suite through the cache + solver pipeline: parse, lookup,
/// solve on miss, store returned cores. In nocache mode lookups are
/// skipped entirely. A SolverCrash aborts the file (recorded Unknown)
/// and the suite continues.
RunResult runSuite(const Suite& suite, SolverBackend& solver, const RunConfig& cfg);

/// runSuite with auditing: every cache hit is additionally solved and
/// its substitution containment re-checked; timeSavedNanos accumulates
/// the audited solve times.
RunResult runAudit(const Suite& suite, SolverBackend& solver, RunConfig cfg);

struct GeneratorParams {
  std::filesystem::path outDir;
  std::size_t fileCount = 200;
  std::size_t maxDistractors = 5;
};

/// Writes a deterministic pseudo-random suite to disk: unsat files
/// embedding cycle cores under renamings and clause permutations, sat
/// chain files, and quantified variants, plus an oracle.json manifest
/// holding ground-truth statuses and core indices.
Suite generateSyntheticSuite(std::uint64_t seed, const GeneratorParams& params);

enum class ReportFormat { Json, Csv };

struct ReportConfigEcho {
  std::string mode = "cachealot";
  bool canonize = false;
  unsigned bloomBits = 1024;
  bool o1 = true, o2 = true, o3 = true;
  std::int64_t lookupTimeoutMs = 100;
  bool audit = false;
};

void emitReport(const std::vector<SuiteMetrics>& metrics, const ReportConfigEcho& echo,
                ReportFormat format, std::ostream& out);
void emitReport(const std::vector<SuiteMetrics>& metrics, const ReportConfigEcho& echo,
                ReportFormat format, const std::filesystem::path& path);

}  // namespace unsatcache

#endif
