// Zero-rate analysis. With (A, U, T1hat) independent of X every rate term
// vanishes, U may carry the action, and the per-action decoders can be
// optimized separately. What remains is a linear program in p(a):
//
//   minimize  sum_a p(a) cost(a)
//   s.t.      sum_a p(a) e1(a) <= D1,  sum_a p(a) e2(a) <= D2,
//
// where e_k(a) is the best per-action distortion. With two constraints an
// optimal vertex mixes at most three actions, so the vertices are enumerated.

#include <array>
#include <cmath>
#include <limits>

#include "rdc/solver.hpp"

namespace rdc {
namespace {

constexpr double kFeasTol = 1e-12;

struct Vertex {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<double> mix;
};

// Solves the 3x3 system M p = rhs by Cramer's rule; false when singular.
bool solve3(const std::array<std::array<double, 3>, 3>& m,
            const std::array<double, 3>& rhs, std::array<double, 3>& out) {
  auto det = [](const std::array<std::array<double, 3>, 3>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det(m);
  if (std::abs(d) < 1e-14) return false;
  for (std::size_t col = 0; col < 3; ++col) {
    auto mc = m;
    for (std::size_t r = 0; r < 3; ++r) mc[r][col] = rhs[r];
    out[col] = det(mc) / d;
  }
  return true;
}

}  // namespace

ZeroRateThreshold zero_rate_threshold(const Scenario& s, double d1,
                                      double d2) {
  const std::size_t na = s.sizes.a;
  const CompiledScenario cs(s, na);
  std::vector<double> e1(na), e2(na);
  for (std::size_t a = 0; a < na; ++a) {
    e1[a] = cs.best_action_dist1(a);
    e2[a] = cs.best_action_dist2(a);
  }
  const auto& cost = s.cost;

  Vertex best;
  auto consider = [&](std::vector<double> mix) {
    double c = 0.0, v1 = 0.0, v2 = 0.0, total = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      if (mix[a] < 0.0) {
        if (mix[a] < -kFeasTol) return;
        mix[a] = 0.0;
      }
      total += mix[a];
    }
    for (double& m : mix) m /= total;
    for (std::size_t a = 0; a < na; ++a) {
      c += mix[a] * cost[a];
      v1 += mix[a] * e1[a];
      v2 += mix[a] * e2[a];
    }
    if (v1 > d1 + kFeasTol || v2 > d2 + kFeasTol) return;
    if (c < best.cost - kFeasTol) best = {c, std::move(mix)};
  };

  // Single actions.
  for (std::size_t a = 0; a < na; ++a) {
    std::vector<double> mix(na, 0.0);
    mix[a] = 1.0;
    consider(std::move(mix));
  }
  // Pairs: endpoints of the feasible interval on each edge.
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = a + 1; b < na; ++b) {
      double lo = 0.0, hi = 1.0;  // weight on b
      bool empty = false;
      for (auto* e : {&e1, &e2}) {
        const double bound = (e == &e1) ? d1 : d2;
        const double base = (*e)[a] - bound;
        const double slope = (*e)[b] - (*e)[a];
        if (std::abs(slope) < 1e-15) {
          if (base > kFeasTol) empty = true;
          continue;
        }
        const double root = -base / slope;
        if (slope > 0) hi = std::min(hi, root);
        else lo = std::max(lo, root);
      }
      if (empty || lo > hi + kFeasTol) continue;
      for (double w : {lo, hi}) {
        std::vector<double> mix(na, 0.0);
        mix[a] = 1.0 - w;
        mix[b] = w;
        consider(std::move(mix));
      }
    }
  }
  // Triples with both distortion constraints tight.
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = a + 1; b < na; ++b)
      for (std::size_t c = b + 1; c < na; ++c) {
        std::array<std::array<double, 3>, 3> m = {
            {{1.0, 1.0, 1.0}, {e1[a], e1[b], e1[c]}, {e2[a], e2[b], e2[c]}}};
        std::array<double, 3> p;
        if (!solve3(m, {1.0, d1, d2}, p)) continue;
        std::vector<double> mix(na, 0.0);
        mix[a] = p[0];
        mix[b] = p[1];
        mix[c] = p[2];
        consider(std::move(mix));
      }

  ZeroRateThreshold out;
  if (!std::isfinite(best.cost)) return out;
  out.feasible = true;
  out.gamma = best.cost;
  out.action_mix = std::move(best.mix);
  return out;
}

Strategy zero_rate_strategy(const Scenario& s, std::span<const double> mix,
                            std::size_t u_card) {
  const auto& n = s.sizes;
  const CompiledScenario cs(s, u_card);
  Strategy st;
  st.u_card = u_card;
  st.kernel.assign(cs.kernel_size(), 0.0);
  for (std::size_t a = 0; a < n.a; ++a) {
    std::size_t t1 = 0;
    cs.best_action_dist1(a, &t1);
    for (std::size_t x = 0; x < n.x; ++x)
      st.kernel[cs.index(x, a, a % u_card, t1)] = mix[a];
  }
  st.decoder2 = optimal_decoder2(s, st.kernel, u_card);
  return st;
}

}  // namespace rdc
