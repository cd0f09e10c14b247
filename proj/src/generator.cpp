// SPDX-License-Identifier: Apache-2.0
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "unsatcache/bench.hpp"
#include "unsatcache/errors.hpp"

namespace unsatcache {

namespace {

// Deterministic helpers over mt19937_64; avoids distribution classes so
// the byte stream is identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
    return lo + below(hi - lo + 1);
  }
  bool chance(std::uint64_t percent) { return below(100) < percent; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

Term var(const Sort& s, const std::string& name) { return Term::variable(s, name); }

Term cmp(const std::string& op, Term a, Term b) {
  return Term::apply(Sort::boolean(), op, true, {std::move(a), std::move(b)});
}

// Core templates use variables t0, t1, ...; instantiation renames them
// to file-local names.
struct CoreTemplate {
  std::vector<Clause> clauses;
};

Var templateVar(std::size_t i, const Sort& s) { return Var{"t" + std::to_string(i), s}; }

CoreTemplate makeCycleCore(Rng& rng) {
  struct Flavor {
    Sort sort;
    const char* op;
  };
  const std::vector<Flavor> flavors = {{Sort::integer(), ">"},
                                       {Sort::integer(), "<"},
                                       {Sort::real(), ">"},
                                       {Sort::bitVec(8), "bvult"},
                                       {Sort::bitVec(8), "bvugt"}};
  const Flavor& flavor = rng.pick(flavors);
  std::size_t k = rng.range(2, 4);
  CoreTemplate core;
  for (std::size_t i = 0; i < k; ++i) {
    Var a = templateVar(i, flavor.sort);
    Var b = templateVar((i + 1) % k, flavor.sort);
    core.clauses.emplace_back(cmp(flavor.op, var(a.sort, a.name), var(b.sort, b.name)));
  }
  return core;
}

CoreTemplate makeContradictionCore(Rng& rng) {
  const std::vector<Sort> sorts = {Sort::integer(), Sort::real(), Sort::bitVec(8)};
  const Sort& sort = rng.pick(sorts);
  CoreTemplate core;
  if (rng.chance(40)) {
    // (distinct x x) is a one-clause contradiction.
    Var x = templateVar(0, sort);
    core.clauses.emplace_back(cmp("distinct", var(sort, x.name), var(sort, x.name)));
  } else {
    Var x = templateVar(0, sort);
    Var y = templateVar(1, sort);
    core.clauses.emplace_back(cmp("=", var(sort, x.name), var(sort, y.name)));
    core.clauses.emplace_back(cmp("distinct", var(sort, x.name), var(sort, y.name)));
  }
  return core;
}

CoreTemplate makeQuantifiedCore(Rng& rng) {
  CoreTemplate core;
  Sort intSort = Sort::integer();
  switch (rng.below(3)) {
    case 0: {
      // (forall ((u0 Int)) (> u0 x)) has no model.
      Var x = templateVar(0, intSort);
      Term body = cmp(">", var(intSort, "u0"), var(intSort, x.name));
      core.clauses.emplace_back(
          Term::binder(BinderKind::Forall, {Var{"u0", intSort}}, std::move(body)));
      break;
    }
    case 1: {
      Var x = templateVar(0, intSort);
      Term body = cmp("<", var(intSort, "u0"), var(intSort, x.name));
      core.clauses.emplace_back(
          Term::binder(BinderKind::Forall, {Var{"u0", intSort}}, std::move(body)));
      break;
    }
    default: {
      // Closed: (forall ((u0 Int) (u1 Int)) (> u0 u1)).
      Term body = cmp(">", var(intSort, "u0"), var(intSort, "u1"));
      core.clauses.emplace_back(Term::binder(
          BinderKind::Forall, {Var{"u0", intSort}, Var{"u1", intSort}}, std::move(body)));
      break;
    }
  }
  return core;
}

// Instantiates a template with file-local names; clause order preserved.
std::vector<Clause> instantiate(const CoreTemplate& core, const std::string& suffix,
                                Rng& rng) {
  Substitution renaming;
  std::set<Var> seen;
  const std::vector<std::string> letters = {"a", "b", "c", "d", "e", "f", "g", "h"};
  std::size_t next = 0;
  for (const Clause& c : core.clauses)
    for (const Var& v : c.freeVars())
      if (seen.insert(v).second)
        renaming.bind(v, Var{letters[next++ % letters.size()] + suffix, v.sort});

  std::vector<Clause> out;
  out.reserve(core.clauses.size());
  for (const Clause& c : core.clauses) {
    Clause renamed = applySubstitution(c, renaming);
    if (rng.chance(30))
      renamed = Clause(renameBindersAvoiding(renamed.term(), {}), renamed.label());
    out.push_back(std::move(renamed));
  }
  return out;
}

// Distractor clauses satisfied by the valuation name_i -> i; always Int.
std::vector<Clause> makeDistractors(std::size_t count, const std::string& suffix,
                                    Rng& rng) {
  const Sort intSort = Sort::integer();
  const std::vector<std::string> letters = {"m", "n", "o", "p", "q", "r", "s", "t"};
  std::size_t varCount = std::min<std::size_t>(letters.size(), 2 + rng.below(5));
  auto name = [&](std::size_t i) { return letters[i] + suffix; };

  std::vector<Clause> out;
  for (std::size_t k = 0; k < count; ++k) {
    switch (rng.below(5)) {
      case 0: case 1: {
        // name_j > name_i for i < j: consistent with the valuation.
        std::size_t i = rng.below(varCount - 1);
        std::size_t j = rng.range(i + 1, varCount - 1);
        out.emplace_back(cmp(">", var(intSort, name(j)), var(intSort, name(i))));
        break;
      }
      case 2: {
        std::size_t i = rng.below(varCount - 1);
        std::size_t j = rng.range(i + 1, varCount - 1);
        out.emplace_back(cmp("<", var(intSort, name(i)), var(intSort, name(j))));
        break;
      }
      case 3: {
        // name_i > C for a constant C < i.
        std::size_t i = rng.below(varCount);
        std::int64_t bound = static_cast<std::int64_t>(i) - 1 -
                             static_cast<std::int64_t>(rng.below(3));
        out.emplace_back(cmp(">", var(intSort, name(i)),
                             Term::constant(intSort, std::to_string(bound))));
        break;
      }
      default: {
        if (rng.chance(50)) {
          // (forall ((q0 Int)) (>= (+ q0 1) q0)) is valid.
          Term sum = Term::apply(intSort, "+", true,
                                 {var(intSort, "q0"), Term::constant(intSort, "1")});
          Term body = cmp(">=", std::move(sum), var(intSort, "q0"));
          out.emplace_back(
              Term::binder(BinderKind::Forall, {Var{"q0", intSort}}, std::move(body)));
        } else {
          // (exists ((q0 Int)) (> q0 name_i)) is valid.
          std::size_t i = rng.below(varCount);
          Term body = cmp(">", var(intSort, "q0"), var(intSort, name(i)));
          out.emplace_back(
              Term::binder(BinderKind::Exists, {Var{"q0", intSort}}, std::move(body)));
        }
        break;
      }
    }
  }
  return out;
}

struct GeneratedFile {
  std::vector<Clause> clauses;
  bool unsat = false;
  std::vector<std::size_t> coreIndices;
};

GeneratedFile makeSatFile(const std::string& suffix, Rng& rng,
                          std::size_t maxDistractors) {
  GeneratedFile file;
  std::size_t count = rng.range(2, std::max<std::size_t>(3, maxDistractors + 2));
  file.clauses = makeDistractors(count, suffix, rng);
  return file;
}

GeneratedFile makeUnsatFile(const CoreTemplate& core, const std::string& suffix, Rng& rng,
                            std::size_t maxDistractors, bool orderedEmbedding) {
  GeneratedFile file;
  file.unsat = true;
  std::vector<Clause> coreClauses = instantiate(core, suffix, rng);
  std::vector<Clause> distractors =
      makeDistractors(rng.below(maxDistractors + 1), suffix, rng);

  if (orderedEmbedding) {
    // Core clauses first, in template order: the canonized clause set of
    // the embedding then contains the canonized core.
    for (std::size_t i = 0; i < coreClauses.size(); ++i) file.coreIndices.push_back(i);
    file.clauses = std::move(coreClauses);
    for (Clause& d : distractors) file.clauses.push_back(std::move(d));
    return file;
  }

  // Shuffled embedding: interleave, with a distractor up front whenever
  // one exists so canonical variable numbering shifts off the core.
  std::vector<std::pair<bool, std::size_t>> slots;  // (isCore, index)
  for (std::size_t i = 0; i < coreClauses.size(); ++i) slots.emplace_back(true, i);
  for (std::size_t i = 0; i < distractors.size(); ++i) slots.emplace_back(false, i);
  rng.shuffle(slots);
  if (!distractors.empty() && slots.front().first) {
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i].first) {
        std::swap(slots[0], slots[i]);
        break;
      }
    }
  }
  file.clauses.reserve(slots.size());
  for (const auto& [isCore, idx] : slots) {
    if (isCore) file.coreIndices.push_back(file.clauses.size());
    file.clauses.push_back(isCore ? std::move(coreClauses[idx])
                                  : std::move(distractors[idx]));
  }
  return file;
}

}  // namespace

Suite generateSyntheticSuite(std::uint64_t seed, const GeneratorParams& params) {
  namespace fs = std::filesystem;
  if (params.fileCount == 0) throw Error("fileCount must be positive");
  std::error_code ec;
  fs::create_directories(params.outDir, ec);
  if (ec) throw IoError("cannot create " + params.outDir.string() + ": " + ec.message());

  Rng rng(seed);
  std::vector<CoreTemplate> pool;
  nlohmann::ordered_json manifest = nlohmann::ordered_json::object();

  std::size_t width = 3;
  for (std::size_t n = params.fileCount; n >= 1000; n /= 10) ++width;

  for (std::size_t i = 0; i < params.fileCount; ++i) {
    std::string number = std::to_string(i);
    std::string fileName = "f" + std::string(width - number.size(), '0') + number + ".smt2";
    std::string suffix = std::to_string(i);

    GeneratedFile file;
    std::uint64_t roll = rng.below(100);
    if (roll < 30) {
      file = makeSatFile(suffix, rng, params.maxDistractors);
    } else if (roll < 55 || pool.empty()) {
      CoreTemplate core = rng.chance(20) ? makeQuantifiedCore(rng)
                          : rng.chance(25) ? makeContradictionCore(rng)
                                           : makeCycleCore(rng);
      file = makeUnsatFile(core, suffix, rng, params.maxDistractors, rng.chance(40));
      pool.push_back(std::move(core));
    } else if (roll < 85) {
      file = makeUnsatFile(rng.pick(pool), suffix, rng, params.maxDistractors, false);
    } else {
      file = makeUnsatFile(rng.pick(pool), suffix, rng, params.maxDistractors, true);
    }

    Formula f;
    f.clauses = std::move(file.clauses);
    f.origin = fileName;
    std::ofstream out(params.outDir / fileName, std::ios::binary);
    if (!out) throw IoError("cannot write " + (params.outDir / fileName).string());
    out << printQuery(f, false);
    out.close();

    nlohmann::ordered_json entry;
    if (file.unsat) {
      entry["status"] = "unsat";
      entry["core"] = file.coreIndices;
      entry["nanos"] = 2'000'000 + rng.below(13'000'000);
    } else {
      entry["status"] = "sat";
      entry["nanos"] = 1'000'000 + rng.below(7'000'000);
    }
    manifest[fileName] = std::move(entry);
  }

  std::ofstream manifestOut(params.outDir / "oracle.json", std::ios::binary);
  if (!manifestOut)
    throw IoError("cannot write " + (params.outDir / "oracle.json").string());
  manifestOut << manifest.dump(2) << "\n";
  manifestOut.close();

  return loadSuite(params.outDir);
}

}  // namespace unsatcache
