// SPDX-License-Identifier: Apache-2.0
#ifndef UNSATCACHE_SOLVER_HPP
#define UNSATCACHE_SOLVER_HPP

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "unsatcache/terms.hpp"

namespace unsatcache {

struct SolveResult {
  enum class Status { Sat, Unsat, Unknown };
  Status status = Status::Unknown;
  std::vector<std::size_t> coreClauseIndices;  // Unsat only
  std::chrono::nanoseconds solveTime{0};
};

/// Black-box solver contract; the cache never looks inside.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual SolveResult solve(const Formula& f, std::chrono::nanoseconds timeout) = 0;
};

/// Runs an external SMT-LIB solver process per query. The query is
/// written to the child's standard input, or to a temporary .smt2 file
/// when the command contains a "{file}" placeholder. Clause names
/// k0..k(n-1) in the returned core map positionally to clause indices;
/// an unsat verdict without a core yields the full clause set. A child
/// that outlives the timeout is killed and reported as Unknown.
class ProcessSolver : public SolverBackend {
 public:
  explicit ProcessSolver(std::string command);
  SolveResult solve(const Formula& f, std::chrono::nanoseconds timeout) override;

 private:
  std::string command_;
};

/// Deterministic test/replay backend: a JSON manifest maps a formula's
/// origin (relative .smt2 path) to its status, core indices and a
/// simulated solving time. Read-only after load.
class ScriptedOracle : public SolverBackend {
 public:
  explicit ScriptedOracle(const std::filesystem::path& manifestPath);
  SolveResult solve(const Formula& f, std::chrono::nanoseconds timeout) override;
  bool knows(const std::string& origin) const { return entries_.count(origin) > 0; }

 private:
  std::map<std::string, SolveResult> entries_;
};

/// Re-solves only the indexed clauses; true iff the subset is unsat.
bool validateCore(SolverBackend& solver, const Formula& f,
                  const std::vector<std::size_t>& indices,
                  std::chrono::nanoseconds timeout);

}  // namespace unsatcache

#endif
