#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rdc/evaluator.hpp"
#include "rdc/scenario.hpp"

namespace rdc::test {

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

// Binary Wyner-Ziv with Hamming distortion, uniform X and BSC(p) side
// information: lower convex envelope of h(p*D) - h(D) on [0, p) joined with
// (p, 0). Evaluated by brute scan over the time-sharing point.
inline double wyner_ziv_binary(double p, double d) {
  if (d >= p) return 0.0;
  auto conv = [](double a, double b) { return a * (1 - b) + b * (1 - a); };
  double best = h2(conv(p, d)) - h2(d);
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double dd = d * i / n;
    double beta = (p - d) / (p - dd);
    best = std::min(best, beta * (h2(conv(p, dd)) - h2(dd)));
  }
  return best;
}

// Deterministic strategy: x -> (a[x], u[x], t1hat[x]).
inline Strategy point_strategy(const Scenario& s, std::size_t u_card,
                               const std::vector<std::size_t>& a,
                               const std::vector<std::size_t>& u,
                               const std::vector<std::size_t>& t,
                               std::vector<std::size_t> decoder2) {
  const auto& n = s.sizes;
  Strategy sigma;
  sigma.u_card = u_card;
  sigma.kernel.assign(n.x * n.a * u_card * n.t1hat, 0.0);
  for (std::size_t x = 0; x < n.x; ++x)
    sigma.kernel[((x * n.a + a[x]) * u_card + u[x]) * n.t1hat + t[x]] = 1.0;
  sigma.decoder2 = std::move(decoder2);
  return sigma;
}

}  // namespace rdc::test
