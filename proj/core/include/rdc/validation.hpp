#pragma once

// Executable oracles: pairs of scenarios whose optimal rates must agree, and
// a randomized suite over the identities every built joint satisfies.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rdc/prob.hpp"
#include "rdc/scenario.hpp"
#include "rdc/solver.hpp"

namespace rdc {

inline constexpr double kReductionTolerance = 5e-3;

struct ReductionSide {
  Scenario scenario;
  SolveConfig config;
};

struct ReductionPoint {
  Constraints budget;
  double rate_general = 0.0;
  double rate_reduced = 0.0;
  bool feasible_general = false;
  bool feasible_reduced = false;
  /// |rate_general - rate_reduced|; +inf when exactly one side is feasible,
  /// 0 when neither is.
  double delta = 0.0;
  bool pass = false;
};

struct ReductionReport {
  std::string name;
  double tolerance = kReductionTolerance;
  std::vector<ReductionPoint> points;

  bool passed() const;
};

/// Solves both sides at every budget. Throws InputError when the two
/// scenarios disagree on |X|, |T1hat| or |T2hat|.
ReductionReport check_reduction(const std::string& name,
                                const ReductionSide& general,
                                const ReductionSide& reduced,
                                const std::vector<Constraints>& points,
                                double tolerance = kReductionTolerance,
                                std::size_t jobs = 1);

struct ReductionCase {
  std::string name;
  ReductionSide general;
  ReductionSide reduced;
  std::vector<Constraints> points;
};

/// Wyner-Ziv, Yamamoto (at full observation cost), Heegard-Berger-Kaspi and
/// vending-machine pairs, three budgets each. `base` supplies seed, restarts
/// and jobs.
std::vector<ReductionCase> builtin_reductions(const SolveConfig& base = {});

using CmiFunction = std::function<double(const JointDistribution&,
                                         const AxisSet&, const AxisSet&,
                                         const AxisSet&)>;

/// Replaceable pieces of the property suite, so tests can check that a
/// broken implementation is caught.
struct PropertyHooks {
  /// Raw (unclamped) I(A;B|C). Defaults to the library implementation.
  CmiFunction cmi;
};

struct PropertyFailure {
  std::string invariant;
  std::size_t trial = 0;
  /// Seed that regenerates the failing (scenario, strategy) pair.
  std::uint64_t trial_seed = 0;
  std::string detail;
};

struct PropertyReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t checks = 0;
  std::vector<PropertyFailure> failures;

  bool passed() const { return failures.empty(); }
};

/// Invariant names reported by run_property_suite.
const std::vector<std::string>& property_names();

PropertyReport run_property_suite(std::uint64_t seed, std::size_t trials,
                                  const PropertyHooks& hooks = {});

/// Random valid scenario and compatible strategy for one trial.
struct PropertyTrial {
  Scenario scenario;
  Strategy strategy;
};
PropertyTrial make_property_trial(std::uint64_t trial_seed);

struct ValidationReport {
  std::vector<ReductionReport> reductions;
  PropertyReport properties;

  bool passed() const;
  std::string to_text() const;
  std::string to_json() const;
};

}  // namespace rdc
