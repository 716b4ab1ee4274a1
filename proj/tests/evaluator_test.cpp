#include <gtest/gtest.h>

#include <random>

#include "rdc/evaluator.hpp"
#include "rdc/validation.hpp"
#include "support.hpp"

namespace rdc {
namespace {

using test::point_strategy;

// DSBS(0.2) with A = 1 everywhere, U = X, decoder t2hat = u*z.
Strategy reveal_x(const Scenario& s) {
  return point_strategy(s, 2, {1, 1}, {0, 1}, {0, 0}, {0, 0, 0, 1});
}

TEST(BuildJoint, Factorization) {
  auto s = dsbs_binary_product(0.2);
  auto j = build_joint(s, reveal_x(s));
  ASSERT_EQ(j.rank(), 7u);
  double total = 0;
  for (double v : j.probs()) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);

  auto xy = marginalize(j, {axis::X, axis::Y});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(xy.probs()[i], s.source[i]);

  // A = 1 gives Z = Y.
  auto yz = marginalize(j, {axis::Y, axis::Z});
  EXPECT_EQ(yz.probs()[1], 0.0);
  EXPECT_EQ(yz.probs()[2], 0.0);

  // Deterministic strategy and channel: one cell per source symbol pair.
  std::size_t support = 0;
  for (double v : j.probs()) support += v > 0;
  EXPECT_EQ(support, 4u);
}

TEST(BuildJoint, RejectsMismatch) {
  auto s = dsbs_binary_product(0.2);
  auto sigma = reveal_x(s);
  sigma.decoder2.pop_back();
  EXPECT_THROW(build_joint(s, sigma), InputError);
  sigma = reveal_x(s);
  sigma.decoder2[0] = 2;
  EXPECT_THROW(build_joint(s, sigma), InputError);
  sigma = reveal_x(s);
  sigma.kernel[0] = 0.5;
  EXPECT_THROW(build_joint(s, sigma), InvalidDistribution);
}

TEST(RequireCompatible, CardinalityBound) {
  auto s = dsbs_binary_product(0.2);
  EXPECT_EQ(cardinality_bound(s), 7u);
  Strategy sigma = point_strategy(s, 8, {0, 0}, {0, 0}, {0, 0},
                                  std::vector<std::size_t>(16, 0));
  EXPECT_THROW(require_compatible(s, sigma), InputError);
  EXPECT_NO_THROW(require_compatible(s, sigma, true));
}

TEST(Rates, Examples) {
  auto s = dsbs_binary_product(0.2);

  auto blind = point_strategy(s, 2, {0, 0}, {1, 1}, {0, 0}, {0, 0, 0, 0});
  auto e = evaluate(s, blind);
  EXPECT_EQ(e.rate_noncausal, 0.0);
  EXPECT_EQ(e.rate_causal, 0.0);
  EXPECT_EQ(e.cost, 0.0);
  EXPECT_NEAR(e.dist2, 0.4, 1e-15);

  // A = 0 makes Z constant, so U = X costs H(X).
  auto copy = point_strategy(s, 2, {0, 0}, {0, 1}, {0, 0}, {0, 0, 0, 1});
  e = evaluate(s, copy);
  EXPECT_NEAR(e.rate_noncausal, 1.0, 1e-12);
  EXPECT_NEAR(e.rate_causal, 1.0, 1e-12);

  e = evaluate(s, reveal_x(s));
  EXPECT_NEAR(e.rate_noncausal, test::h2(0.2), 1e-12);
  EXPECT_NEAR(e.rate_noncausal, 0.721928, 1e-6);
  EXPECT_NEAR(e.rate_causal, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(e.cost, 1.0);
  EXPECT_EQ(e.dist2, 0.0);
}

TEST(Distortion, BinaryExampleSchemes) {
  auto s = dsbs_binary_product(0.2);
  // Observe Y, decode t2hat = z with U constant.
  auto look = point_strategy(s, 1, {1, 1}, {0, 0}, {0, 0}, {0, 1});
  auto j = build_joint(s, look);
  EXPECT_DOUBLE_EQ(expected_cost(j, s), 1.0);
  EXPECT_NEAR(expected_distortion(j, s, 2), 0.1, 1e-15);
  EXPECT_EQ(expected_distortion(j, s, 1), 0.0);
  EXPECT_THROW(expected_distortion(j, s, 3), InputError);
}

TEST(OptimalDecoder, Examples) {
  auto s = dsbs_binary_product(0.2);
  auto look = point_strategy(s, 1, {1, 1}, {0, 0}, {0, 0}, {0, 0});
  EXPECT_EQ(optimal_decoder2(s, look.kernel, 1), (std::vector<std::size_t>{0, 1}));

  // Certainty: U = X and Z = Y pin down X*Y.
  auto sure = reveal_x(s);
  EXPECT_EQ(optimal_decoder2(s, sure.kernel, 2),
            (std::vector<std::size_t>{0, 0, 0, 1}));

  // Z independent of X, uniform X: a tie in every cell, and U = 1 never occurs.
  auto wz = reduction_wyner_ziv(0.5);
  auto flat = point_strategy(wz, 2, {0, 0}, {0, 0}, {0, 0}, {0, 0, 0, 0});
  EXPECT_EQ(optimal_decoder2(wz, flat.kernel, 2),
            (std::vector<std::size_t>{0, 0, 0, 0}));
}

std::vector<double> random_kernel(std::mt19937_64& rng, std::size_t slices,
                                  std::size_t width) {
  std::gamma_distribution<double> g(1.0);
  std::vector<double> k(slices * width);
  for (std::size_t i = 0; i < slices; ++i) {
    double t = 0;
    for (std::size_t j = 0; j < width; ++j) t += k[i * width + j] = g(rng) + 1e-3;
    for (std::size_t j = 0; j < width; ++j) k[i * width + j] /= t;
  }
  return k;
}

TEST(OptimalDecoder, NeverWorseThanAnyTable) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = make_property_trial(trial).scenario;
    const std::size_t U = 2;
    const auto& n = s.sizes;
    Strategy sigma;
    sigma.u_card = U;
    sigma.kernel = random_kernel(rng, n.x, n.a * U * n.t1hat);
    sigma.decoder2 = optimal_decoder2(s, sigma.kernel, U);
    const double best = evaluate(s, sigma).dist2;
    std::size_t tables = 1;
    for (std::size_t i = 0; i < U * n.z; ++i) tables *= n.t2hat;
    for (std::size_t code = 0; code < std::min<std::size_t>(tables, 729); ++code) {
      std::size_t c = code;
      for (auto& d : sigma.decoder2) {
        d = c % n.t2hat;
        c /= n.t2hat;
      }
      EXPECT_LE(best, evaluate(s, sigma).dist2 + 1e-12);
    }
  }
}

TEST(Compiled, MatchesTensorPath) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = make_property_trial(100 + trial).scenario;
    for (std::size_t U : {1, 3}) {
      CompiledScenario cs(s, U);
      auto kernel = random_kernel(rng, s.sizes.x, cs.slice_size());
      std::vector<std::size_t> dec;
      auto fast = cs.evaluate(kernel, {}, &dec);
      EXPECT_EQ(dec, optimal_decoder2(s, kernel, U));
      auto slow = evaluate(s, Strategy{U, kernel, dec});
      EXPECT_NEAR(fast.rate_noncausal, slow.rate_noncausal, 1e-10);
      EXPECT_NEAR(fast.rate_causal, slow.rate_causal, 1e-10);
      EXPECT_NEAR(fast.cost, slow.cost, 1e-12);
      EXPECT_NEAR(fast.dist1, slow.dist1, 1e-12);
      EXPECT_NEAR(fast.dist2, slow.dist2, 1e-12);
    }
  }
}

// Directional derivatives along e_i - e_j inside one x slice.
TEST(Compiled, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = make_property_trial(200 + trial).scenario;
    CompiledScenario cs(s, 2);
    auto kernel = random_kernel(rng, s.sizes.x, cs.slice_size());
    auto dec = cs.bayes_decoder(kernel);
    for (bool causal : {false, true}) {
      CompiledScenario::Gradient g;
      cs.gradient(kernel, dec, causal, g);
      const std::size_t w = cs.slice_size();
      if (w < 2) continue;
      for (std::size_t x = 0; x < s.sizes.x; ++x) {
        const std::size_t i = x * w, j = x * w + w - 1;
        const double h = 1e-6;
        auto at = [&](double t) {
          auto k = kernel;
          k[i] += t;
          k[j] -= t;
          return cs.evaluate(k, dec);
        };
        auto hi = at(h), lo = at(-h);
        auto rate = [&](const Evaluation& e) {
          return causal ? e.rate_causal : e.rate_noncausal;
        };
        EXPECT_NEAR((rate(hi) - rate(lo)) / (2 * h), g.rate[i] - g.rate[j], 1e-5);
        EXPECT_NEAR((hi.cost - lo.cost) / (2 * h), g.cost[i] - g.cost[j], 1e-7);
        EXPECT_NEAR((hi.dist1 - lo.dist1) / (2 * h), g.dist1[i] - g.dist1[j], 1e-7);
        EXPECT_NEAR((hi.dist2 - lo.dist2) / (2 * h), g.dist2[i] - g.dist2[j], 1e-7);
      }
    }
  }
}

TEST(Compiled, PerActionBests) {
  auto s = dsbs_binary_product(0.2);
  CompiledScenario cs(s, 2);
  std::vector<std::size_t> dec;
  EXPECT_NEAR(cs.best_action_dist2(0, &dec), 0.4, 1e-15);
  EXPECT_NEAR(cs.best_action_dist2(1, &dec), 0.1, 1e-15);
  EXPECT_EQ(dec, (std::vector<std::size_t>{0, 1}));
  std::size_t sym = 9;
  EXPECT_EQ(cs.best_action_dist1(1, &sym), 0.0);
  EXPECT_EQ(sym, 0u);
}

}  // namespace
}  // namespace rdc
