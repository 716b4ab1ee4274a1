#pragma once

// Numerical minimization of the rate functionals over strategies subject to
// cost and distortion budgets. All results are upper bounds on the true
// minimum; the brute-force grid search is kept as an independent oracle.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rdc/evaluator.hpp"
#include "rdc/scenario.hpp"

namespace rdc {

enum class RateMode { noncausal, causal };

const char* to_string(RateMode mode);
/// Accepts "noncausal" / "causal"; throws InputError otherwise.
RateMode parse_rate_mode(const std::string& text);

/// Budgets (D1, D2, Gamma).
struct Constraints {
  double d1 = 0.0;
  double d2 = 0.0;
  double gamma = 0.0;
};

struct SolveConfig {
  RateMode mode = RateMode::noncausal;
  /// Restrict actions to be independent of X: p(a) p(u,t1hat|x,a).
  bool greedy = false;
  /// Auxiliary alphabet size; 0 selects the cardinality bound |X||A|+3.
  std::size_t u_card = 0;
  bool allow_large_u = false;
  /// Random starts. When positive, two informative starts (U reveals X) are
  /// refined as well.
  std::size_t restarts = 6;
  /// Resolution of brute_force_solve's grid over each simplex.
  double grid_step = 0.05;
  /// Cap on coordinate-refinement sweeps per penalty stage.
  std::size_t local_iters = 200;
  double constraint_slack = 1e-9;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  /// Fixed decoder table [u][z]; empty means posterior-Bayes at every step.
  std::vector<std::size_t> fixed_decoder2;
  /// Tie the action to the auxiliary symbol: a = u mod |A|.
  bool deterministic_action = false;
  /// Extra starting points, refined before the random restarts.
  std::vector<Strategy> warm_starts;

  std::size_t resolved_u_card(const Scenario& s) const;
};

/// Preset mirroring the binary evaluation with |U| = 2 and the fixed decoder
/// t2hat(u, z) = u * z (needs binary Z and T2hat).
SolveConfig product_decoder_preset(SolveConfig base = {});

struct SolveDiagnostics {
  std::size_t restarts = 0;
  /// Rate reached by each start (warm, then informative, then random);
  /// +inf when infeasible.
  std::vector<double> restart_rates;
  /// Max minus min over the feasible entries of restart_rates.
  double restart_spread = 0.0;
  double wall_seconds = 0.0;
  std::size_t evaluations = 0;
  /// Set when a zero-rate strategy met every budget, which is optimal.
  bool zero_rate_shortcut = false;
};

struct SolveResult {
  double rate = 0.0;
  Strategy strategy;
  Evaluation evaluation;
  bool feasible = false;
  SolveDiagnostics diagnostics;
};

/// Rate of the configured mode taken from an evaluation.
double rate_of(const Evaluation& e, RateMode mode);
/// Largest budget overshoot (0 when every constraint holds).
double max_violation(const Evaluation& e, const Constraints& c);

/// Best strategy found by multi-start penalized coordinate refinement.
/// Infeasibility is reported through SolveResult::feasible.
SolveResult solve(const Scenario& s, const Constraints& c,
                  const SolveConfig& cfg = {});

/// Smallest E[cost(A)] at which both distortion budgets are met with zero
/// rate, i.e. with (A, U, T1hat) independent of X.
struct ZeroRateThreshold {
  bool feasible = false;
  double gamma = 0.0;
  std::vector<double> action_mix;  // optimal p(a)
};
ZeroRateThreshold zero_rate_threshold(const Scenario& s, double d1, double d2);

/// Zero-rate strategy realizing `mix`: U carries the action, T1hat is the
/// best constant for that action, decoder 2 is posterior-Bayes.
Strategy zero_rate_strategy(const Scenario& s, std::span<const double> mix,
                            std::size_t u_card);

/// Exhaustive search over every kernel whose entries are multiples of `step`
/// (decoder 2 Bayes unless cfg fixes it). Throws InputError when the grid
/// exceeds 1e8 points. Uses cfg.mode, greedy, u_card, fixed_decoder2 and
/// deterministic_action.
SolveResult brute_force_solve(const Scenario& s, const Constraints& c,
                              double step, const SolveConfig& cfg = {});

/// Number of grid points brute_force_solve would visit.
double brute_force_grid_size(const Scenario& s, double step,
                             const SolveConfig& cfg = {});

struct SweepGrid {
  std::vector<double> d1;
  std::vector<double> d2;
  std::vector<double> gamma;
  std::vector<RateMode> modes = {RateMode::noncausal};
  std::vector<bool> greedy = {false};
};

struct SweepRow {
  Constraints constraints;
  RateMode mode = RateMode::noncausal;
  bool greedy = false;
  SolveResult result;
};

/// One row per (d1, d2, mode, greedy, gamma) in that nesting order. Each
/// point is solved from fresh restarts, re-solved from its neighbours'
/// strategies, and finally every row adopts any strategy from the sweep that
/// lies in its search space, meets its budgets, and has lower rate. Output is
/// independent of cfg.jobs.
std::vector<SweepRow> sweep(const Scenario& s, const SweepGrid& grid,
                            const SolveConfig& cfg = {});

/// Header: gamma,d1,d2,mode,greedy,rate,cost,dist1,dist2,feasible,restart_spread
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace rdc
