#pragma once

#include <cstdint>
#include <vector>

#include "rdc/solver.hpp"

namespace rdc::detail {

struct Candidate {
  Strategy strategy;
  Evaluation evaluation;
  double rate = 0.0;
  double violation = 0.0;
  bool feasible = false;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

void check_solve_inputs(const Scenario& s, const Constraints& c,
                        const SolveConfig& cfg);

/// Attaches decoder 2 (fixed or Bayes) and evaluates through the joint.
Candidate make_candidate(const Scenario& s, const CompiledScenario& cs,
                         std::vector<double> kernel, const SolveConfig& cfg,
                         const Constraints& c);

/// Feasible first, then lower violation, rate, cost, dist2, and finally the
/// lexicographically smaller kernel.
bool better(const Candidate& a, const Candidate& b);

SolveResult to_result(Candidate best);

}  // namespace rdc::detail
