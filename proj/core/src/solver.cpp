#include "rdc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "candidate.hpp"
#include "layout.hpp"
#include "rdc/error.hpp"
#include "rdc/parallel.hpp"
#include "refine.hpp"

namespace rdc {

const char* to_string(RateMode mode) {
  return mode == RateMode::causal ? "causal" : "noncausal";
}

RateMode parse_rate_mode(const std::string& text) {
  if (text == "noncausal") return RateMode::noncausal;
  if (text == "causal") return RateMode::causal;
  throw InputError("unknown rate mode '" + text +
                   "' (expected noncausal or causal)");
}

std::size_t SolveConfig::resolved_u_card(const Scenario& s) const {
  return u_card == 0 ? cardinality_bound(s) : u_card;
}

SolveConfig product_decoder_preset(SolveConfig base) {
  base.u_card = 2;
  base.fixed_decoder2 = {0, 0, 0, 1};  // [u][z] -> u * z
  return base;
}

double rate_of(const Evaluation& e, RateMode mode) {
  return mode == RateMode::causal ? e.rate_causal : e.rate_noncausal;
}

double max_violation(const Evaluation& e, const Constraints& c) {
  return std::max({0.0, e.cost - c.gamma, e.dist1 - c.d1, e.dist2 - c.d2});
}

namespace detail {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_solve_inputs(const Scenario& s, const Constraints& c,
                        const SolveConfig& cfg) {
  require_valid(s);
  for (double v : {c.d1, c.d2, c.gamma}) {
    if (!(v >= 0.0) || std::isnan(v))
      throw InputError("budgets D1, D2 and Gamma must be non-negative");
  }
  const std::size_t u = cfg.resolved_u_card(s);
  if (!cfg.allow_large_u && u > cardinality_bound(s)) {
    std::ostringstream os;
    os << "u_card " << u << " exceeds the bound |X||A|+3 = "
       << cardinality_bound(s) << " (set allow_large_u to override)";
    throw InputError(os.str());
  }
  if (!(cfg.grid_step > 0.0 && cfg.grid_step <= 1.0))
    throw InputError("grid_step must lie in (0, 1]");
  if (!cfg.fixed_decoder2.empty()) {
    if (cfg.fixed_decoder2.size() != u * s.sizes.z)
      throw InputError("fixed decoder table must have u_card * |Z| entries");
    for (std::size_t h : cfg.fixed_decoder2)
      if (h >= s.sizes.t2hat)
        throw InputError("fixed decoder entry outside the T2hat alphabet");
  }
}

Candidate make_candidate(const Scenario& s, const CompiledScenario& cs,
                         std::vector<double> kernel, const SolveConfig& cfg,
                         const Constraints& c) {
  Candidate cand;
  cand.strategy.u_card = cs.u_card();
  cand.strategy.decoder2 = cfg.fixed_decoder2.empty()
                               ? cs.bayes_decoder(kernel)
                               : cfg.fixed_decoder2;
  cand.strategy.kernel = std::move(kernel);
  cand.evaluation = evaluate(s, cand.strategy);
  cand.rate = rate_of(cand.evaluation, cfg.mode);
  cand.violation = max_violation(cand.evaluation, c);
  cand.feasible = cand.violation <= cfg.constraint_slack;
  return cand;
}

bool better(const Candidate& a, const Candidate& b) {
  constexpr double kTie = 1e-12;
  if (a.feasible != b.feasible) return a.feasible;
  if (!a.feasible && a.violation != b.violation)
    return a.violation < b.violation;
  if (std::abs(a.rate - b.rate) > kTie) return a.rate < b.rate;
  if (std::abs(a.evaluation.cost - b.evaluation.cost) > kTie)
    return a.evaluation.cost < b.evaluation.cost;
  if (std::abs(a.evaluation.dist2 - b.evaluation.dist2) > kTie)
    return a.evaluation.dist2 < b.evaluation.dist2;
  return std::lexicographical_compare(
      a.strategy.kernel.begin(), a.strategy.kernel.end(),
      b.strategy.kernel.begin(), b.strategy.kernel.end());
}

SolveResult to_result(Candidate best) {
  SolveResult r;
  r.rate = best.rate;
  r.feasible = best.feasible;
  r.evaluation = best.evaluation;
  r.strategy = std::move(best.strategy);
  return r;
}

}  // namespace detail

namespace {

std::vector<double> random_params(const detail::Layout& layout,
                                  std::mt19937_64& rng) {
  std::vector<double> params(layout.param_count(), 0.0);
  for (const auto& block : layout.blocks()) {
    double total = 0.0;
    for (std::size_t i : block) {
      // Exponential variates normalized to a flat Dirichlet draw.
      const double u = double(rng() >> 11) * 0x1.0p-53;
      params[i] = -std::log1p(-u);
      total += params[i];
    }
    for (std::size_t i : block) params[i] /= total;
  }
  return params;
}

// Kernels in which U reveals X (and the action), paired with the best
// decoder-1 symbol per (x, a). Random starts tend to settle on kernels that
// ignore X, where a Bayes decoder offers no descent direction; these starts
// approach the optimum from the informative side instead.
std::vector<std::vector<double>> informative_starts(
    const Scenario& s, const CompiledScenario& cs,
    const detail::Layout& layout) {
  const auto& n = s.sizes;
  const std::size_t U = cs.u_card();
  auto best_t1 = [&](std::size_t x, std::size_t a) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n.t1hat; ++t) {
      double d = 0.0;
      for (std::size_t y = 0; y < n.y; ++y)
        for (std::size_t z = 0; z < n.z; ++z)
          d += s.p_xy(x, y) * s.p_z(x, y, a, z) * s.dist1(s.target1(x, y, z), t);
      if (d < best_d - 1e-15) {
        best_d = d;
        best = t;
      }
    }
    return best;
  };
  const auto cheapest = static_cast<std::size_t>(
      std::min_element(s.cost.begin(), s.cost.end()) - s.cost.begin());
  std::vector<std::vector<double>> out;
  for (bool all_actions : {false, true}) {
    std::vector<double> kernel(cs.kernel_size(), 0.0);
    for (std::size_t x = 0; x < n.x; ++x) {
      const std::size_t count = all_actions ? n.a : 1;
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t a = all_actions ? k : cheapest;
        const std::size_t u = (x * n.a + a) % U;
        kernel[cs.index(x, a, u, best_t1(x, a))] += 1.0 / double(count);
      }
    }
    out.push_back(layout.from_kernel(kernel));
  }
  return out;
}

}  // namespace

SolveResult solve(const Scenario& s, const Constraints& c,
                  const SolveConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const auto started = clock::now();
  detail::check_solve_inputs(s, c, cfg);
  const std::size_t u = cfg.resolved_u_card(s);
  const CompiledScenario cs(s, u);
  const detail::Layout layout(cs, cfg.greedy, cfg.deterministic_action);

  // Rate is never negative, so a feasible zero-rate strategy is optimal.
  const ZeroRateThreshold zr = zero_rate_threshold(s, c.d1, c.d2);
  if (zr.feasible && zr.gamma <= c.gamma + cfg.constraint_slack) {
    Strategy z = zero_rate_strategy(s, zr.action_mix, u);
    auto params = layout.from_kernel(z.kernel);
    std::vector<double> kernel;
    layout.to_kernel(params, kernel);
    auto cand = detail::make_candidate(s, cs, std::move(kernel), cfg, c);
    if (cand.feasible && cand.rate <= 1e-12) {
      SolveResult r = detail::to_result(std::move(cand));
      r.diagnostics.zero_rate_shortcut = true;
      r.diagnostics.restart_rates = {r.rate};
      r.diagnostics.wall_seconds =
          std::chrono::duration<double>(clock::now() - started).count();
      return r;
    }
  }

  std::vector<std::vector<double>> starts;
  for (const auto& w : cfg.warm_starts) {
    if (w.u_card != u || w.kernel.size() != cs.kernel_size()) continue;
    starts.push_back(layout.from_kernel(w.kernel));
  }
  const auto informative = informative_starts(s, cs, layout);
  if (cfg.restarts > 0)
    starts.insert(starts.end(), informative.begin(), informative.end());
  const std::size_t warm = starts.size();
  starts.resize(warm + cfg.restarts);
  std::vector<detail::Candidate> found(starts.size());
  std::vector<std::size_t> evals(starts.size(), 0);

  detail::RefineOptions opt;
  opt.mode = cfg.mode;
  opt.budget = c;
  opt.slack = cfg.constraint_slack;
  opt.local_iters = cfg.local_iters;
  opt.fixed_decoder = cfg.fixed_decoder2;

  parallel_for(starts.size(), cfg.jobs, [&](std::size_t i) {
    std::vector<double> params = std::move(starts[i]);
    if (i >= warm) {
      std::mt19937_64 rng(detail::mix_seed(cfg.seed, i - warm));
      params = random_params(layout, rng);
      // Blend with an informative kernel so random starts begin on both
      // sides of the collapse to X-independent kernels.
      const auto& anchor = informative[(i - warm) % informative.size()];
      const double w = double(rng() >> 11) * 0x1.0p-53;
      for (std::size_t k = 0; k < params.size(); ++k)
        params[k] = w * anchor[k] + (1.0 - w) * params[k];
    }
    detail::Refiner refiner(cs, layout, opt);
    refiner.run(params);
    evals[i] = refiner.evaluations();
    std::vector<double> kernel;
    layout.to_kernel(params, kernel);
    found[i] = detail::make_candidate(s, cs, std::move(kernel), cfg, c);
  });

  if (found.empty())
    throw InputError("solve needs at least one restart or warm start");
  std::size_t best = 0;
  for (std::size_t i = 1; i < found.size(); ++i)
    if (detail::better(found[i], found[best])) best = i;

  SolveDiagnostics diag;
  diag.restarts = found.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < found.size(); ++i) {
    const double r = found[i].feasible
                         ? found[i].rate
                         : std::numeric_limits<double>::infinity();
    diag.restart_rates.push_back(r);
    diag.evaluations += evals[i];
    if (found[i].feasible) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  diag.restart_spread = hi >= lo ? hi - lo : 0.0;
  SolveResult r = detail::to_result(std::move(found[best]));
  diag.wall_seconds =
      std::chrono::duration<double>(clock::now() - started).count();
  r.diagnostics = std::move(diag);
  return r;
}

}  // namespace rdc
