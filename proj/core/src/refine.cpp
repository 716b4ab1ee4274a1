#include "refine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rdc::detail {
namespace {

constexpr double kRhoStart = 100.0;
constexpr double kRhoFactor = 10.0;
constexpr double kRhoCap = 1e6;
constexpr double kRestoreMu = 1e6;
constexpr std::size_t kMaxStages = 12;
constexpr std::size_t kMovesPerBlock = 2;
constexpr std::size_t kGoldenIters = 12;
constexpr double kInvPhi = 0.6180339887498949;

}  // namespace

Refiner::Refiner(const CompiledScenario& cs, const Layout& layout,
                 RefineOptions options)
    : cs_(cs), layout_(layout), opt_(options) {
  step_hint_.assign(layout_.blocks().size(), 1.0);
}

std::array<double, 3> Refiner::violations(const Evaluation& e) const {
  return {e.cost - opt_.budget.gamma, e.dist1 - opt_.budget.d1,
          e.dist2 - opt_.budget.d2};
}

double Refiner::penalty_value(const Evaluation& e) const {
  const auto v = violations(e);
  double total = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    if (pen_.exact) {
      total += pen_.mu * std::max(0.0, v[c]);
    } else {
      const double shifted = std::max(0.0, pen_.lambda[c] / pen_.rho + v[c]);
      const double base = pen_.lambda[c] / pen_.rho;
      total += 0.5 * pen_.rho * (shifted * shifted - base * base);
    }
  }
  return total;
}

std::array<double, 3> Refiner::penalty_weights(const Evaluation& e) const {
  const auto v = violations(e);
  std::array<double, 3> w{};
  for (std::size_t c = 0; c < 3; ++c) {
    w[c] = pen_.exact ? (v[c] > 0.0 ? pen_.mu : 0.0)
                      : std::max(0.0, pen_.lambda[c] + pen_.rho * v[c]);
  }
  return w;
}

double Refiner::objective(std::span<const double> params) {
  ++evaluations_;
  layout_.to_kernel(params, kernel_);
  last_ = cs_.evaluate(kernel_, opt_.fixed_decoder,
                       opt_.fixed_decoder.empty() ? &decoder_ : nullptr);
  return rate_of(last_, opt_.mode) + penalty_value(last_);
}

bool Refiner::line_search(std::vector<double>& params, std::size_t block,
                          std::size_t donor, std::size_t receiver,
                          double& value) {
  const double t_max = params[donor];
  if (!(t_max > 0.0)) return false;
  trial_ = params;
  auto eval_at = [&](double t) {
    trial_[donor] = (t >= t_max) ? 0.0 : params[donor] - t;
    trial_[receiver] = params[receiver] + std::min(t, t_max);
    return objective(trial_);
  };

  double t = std::min(t_max, step_hint_[block]);
  double f = eval_at(t);
  double hi = t_max;
  if (f < value) {
    while (t < t_max) {
      const double t2 = std::min(2.0 * t, t_max);
      const double f2 = eval_at(t2);
      if (f2 < f) {
        t = t2;
        f = f2;
      } else {
        hi = t2;
        break;
      }
    }
  } else {
    bool found = false;
    for (int k = 0; k < 40 && t > 1e-300; ++k) {
      hi = t;
      t *= 0.25;
      f = eval_at(t);
      if (f < value) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }

  // Golden-section polish inside [t/2, hi], keeping the best point seen.
  if (t < t_max) {
    double lo = 0.5 * t;
    double a = hi - kInvPhi * (hi - lo);
    double b = lo + kInvPhi * (hi - lo);
    double fa = eval_at(a);
    double fb = eval_at(b);
    for (std::size_t it = 0; it < kGoldenIters; ++it) {
      if (fa < f) { t = a; f = fa; }
      if (fb < f) { t = b; f = fb; }
      if (fa <= fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - kInvPhi * (hi - lo);
        fa = eval_at(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + kInvPhi * (hi - lo);
        fb = eval_at(b);
      }
    }
    if (fa < f) { t = a; f = fa; }
    if (fb < f) { t = b; f = fb; }
  }

  if (!(f < value)) return false;
  params[donor] = (t >= t_max) ? 0.0 : params[donor] - t;
  params[receiver] += std::min(t, t_max);
  step_hint_[block] = std::max(t, 1e-12);
  value = objective(params);
  return true;
}

bool Refiner::improve_block(std::vector<double>& params, std::size_t block,
                            double& value) {
  const auto& idx = layout_.blocks()[block];
  if (idx.size() < 2) return false;

  // Refresh the decoder and penalty weights at the current point.
  value = objective(params);
  const auto w = penalty_weights(last_);
  cs_.gradient(kernel_, opt_.fixed_decoder.empty() ? decoder_ : opt_.fixed_decoder,
               opt_.mode == RateMode::causal, grad_);
  kernel_grad_.resize(grad_.rate.size());
  for (std::size_t i = 0; i < grad_.rate.size(); ++i)
    kernel_grad_[i] = grad_.rate[i] + w[0] * grad_.cost[i] +
                      w[1] * grad_.dist1[i] + w[2] * grad_.dist2[i];
  layout_.param_gradient(params, kernel_grad_, param_grad_);

  std::vector<std::size_t> donors, receivers(idx.begin(), idx.end());
  for (std::size_t i : idx)
    if (params[i] > 0.0) donors.push_back(i);
  if (donors.empty()) return false;
  auto by_grad_desc = [&](std::size_t l, std::size_t r) {
    return param_grad_[l] > param_grad_[r] ||
           (param_grad_[l] == param_grad_[r] && l < r);
  };
  auto by_grad_asc = [&](std::size_t l, std::size_t r) {
    return param_grad_[l] < param_grad_[r] ||
           (param_grad_[l] == param_grad_[r] && l < r);
  };
  std::sort(donors.begin(), donors.end(), by_grad_desc);
  std::sort(receivers.begin(), receivers.end(), by_grad_asc);

  // A few candidate pairs in order of gradient gap.
  const std::pair<std::size_t, std::size_t> tries[] = {
      {0, 0}, {0, 1}, {1, 0}, {0, 2}};
  for (auto [di, ri] : tries) {
    if (di >= donors.size() || ri >= receivers.size()) continue;
    const std::size_t d = donors[di];
    const std::size_t r = receivers[ri];
    if (d == r) continue;
    if (!(param_grad_[r] < param_grad_[d] - 1e-12)) continue;
    if (line_search(params, block, d, r, value)) return true;
  }
  return false;
}

// Distortion under the Bayes decoder is concave in the kernel, so a point
// where every small pair move is uphill can still have a better vertex. Tries
// moving all or half of each entry's mass to every other entry of its block
// and keeps the best move found.
bool Refiner::escape(std::vector<double>& params, double& value) {
  double best = value;
  std::size_t best_d = 0, best_r = 0;
  double best_t = 0.0;
  for (const auto& idx : layout_.blocks()) {
    for (std::size_t d : idx) {
      if (!(params[d] > 0.0)) continue;
      for (std::size_t r : idx) {
        if (r == d) continue;
        for (double frac : {1.0, 0.5}) {
          const double t = frac * params[d];
          trial_ = params;
          trial_[d] = frac == 1.0 ? 0.0 : params[d] - t;
          trial_[r] += t;
          const double f = objective(trial_);
          if (f < best - 1e-12 * (1.0 + std::abs(best))) {
            best = f;
            best_d = d;
            best_r = r;
            best_t = t;
          }
        }
      }
    }
  }
  if (!(best_t > 0.0)) return false;
  params[best_d] = best_t >= params[best_d] ? 0.0 : params[best_d] - best_t;
  params[best_r] += best_t;
  value = objective(params);
  return true;
}

void Refiner::inner(std::vector<double>& params) {
  double value = objective(params);
  for (std::size_t it = 0; it < opt_.local_iters; ++it) {
    const double start = value;
    layout_.revive_unused_actions(params);
    for (std::size_t b = 0; b < layout_.blocks().size(); ++b) {
      for (std::size_t m = 0; m < kMovesPerBlock; ++m)
        if (!improve_block(params, b, value)) break;
    }
    if (start - value <= 1e-13 * (1.0 + std::abs(value)) &&
        !escape(params, value))
      break;
  }
}

void Refiner::run(std::vector<double>& params) {
  pen_ = Penalty{};
  pen_.rho = kRhoStart;
  double prev_violation = std::numeric_limits<double>::infinity();
  double prev_rate = std::numeric_limits<double>::infinity();
  for (std::size_t stage = 0; stage < kMaxStages; ++stage) {
    inner(params);
    objective(params);
    const auto v = violations(last_);
    const double worst = std::max({0.0, v[0], v[1], v[2]});
    const double rate = rate_of(last_, opt_.mode);
    for (std::size_t c = 0; c < 3; ++c)
      pen_.lambda[c] = std::max(0.0, pen_.lambda[c] + pen_.rho * v[c]);
    if (worst <= 0.1 * opt_.slack &&
        std::abs(rate - prev_rate) <= 1e-9 * (1.0 + rate))
      break;
    if (worst > 0.25 * prev_violation)
      pen_.rho = std::min(pen_.rho * kRhoFactor, kRhoCap);
    prev_violation = worst;
    prev_rate = rate;
  }

  // Exact-penalty pass: restores feasibility lost to the smooth penalty and
  // keeps descending along the constraint boundary.
  pen_.exact = true;
  pen_.mu = kRestoreMu;
  inner(params);

  for (const auto& block : layout_.blocks()) {
    double total = 0.0;
    for (std::size_t i : block) total += params[i];
    if (total > 0.0)
      for (std::size_t i : block) params[i] /= total;
  }
}

}  // namespace rdc::detail
