#include <gtest/gtest.h>

#include <algorithm>

#include "rdc/validation.hpp"

namespace rdc {
namespace {

TEST(PropertySuite, EmptyRunPasses) {
  auto r = run_property_suite(1, 0);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.checks, 0u);
}

TEST(PropertySuite, DefaultTrialsPass) {
  auto r = run_property_suite(1, 200);
  EXPECT_TRUE(r.passed()) << r.failures.front().invariant << ": "
                          << r.failures.front().detail;
  EXPECT_EQ(r.checks, 200 * property_names().size());
}

TEST(PropertySuite, Deterministic) {
  auto a = run_property_suite(9, 20);
  auto b = run_property_suite(9, 20);
  EXPECT_EQ(a.checks, b.checks);
  auto ta = make_property_trial(123), tb = make_property_trial(123);
  EXPECT_EQ(ta.strategy.kernel, tb.strategy.kernel);
  EXPECT_EQ(ta.scenario.channel, tb.scenario.channel);
}

TEST(PropertySuite, CatchesBrokenChainRule) {
  PropertyHooks broken;
  // Drops the H(C) term: wrong whenever the conditioning set is informative.
  broken.cmi = [](const JointDistribution& j, const AxisSet& a, const AxisSet& b,
                  const AxisSet& c) {
    return raw_conditional_mutual_information(j, a, b, c) + entropy(j, c);
  };
  auto r = run_property_suite(1, 50, broken);
  ASSERT_FALSE(r.passed());
  EXPECT_TRUE(std::any_of(r.failures.begin(), r.failures.end(),
                          [](const auto& f) { return f.invariant == "chain_rule"; }));
  // The reported seed regenerates the failing trial.
  auto trial = make_property_trial(r.failures.front().trial_seed);
  EXPECT_TRUE(validate(trial.scenario).empty());
}

TEST(Reduction, MismatchedAlphabetsRejected) {
  ReductionSide a{dsbs_binary_product(0.2), {}};
  ReductionSide b{reduction_heegard_berger(0.2, 0.3), {}};
  EXPECT_THROW(check_reduction("bad", a, b, {{0, 0.1, 1}}), InputError);
}

TEST(Reduction, VacuousDistortionGivesZeroRates) {
  SolveConfig cfg;
  cfg.restarts = 1;
  auto wz = reduction_wyner_ziv(0.2);
  ReductionSide general{wz, cfg}, reduced{drop_actions(wz), cfg};
  auto r = check_reduction("wz-vacuous", general, reduced,
                           {{0.0, d2_table_max(wz), 0.0}});
  ASSERT_TRUE(r.passed());
  EXPECT_EQ(r.points[0].rate_general, 0.0);
  EXPECT_EQ(r.points[0].rate_reduced, 0.0);
}

TEST(Reduction, WynerZivPoint) {
  SolveConfig cfg;
  cfg.restarts = 2;
  auto wz = reduction_wyner_ziv(0.2);
  auto r = check_reduction("wz", {wz, cfg}, {drop_actions(wz), cfg},
                           {{0.0, 0.1, 1.0}});
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.points[0].delta, 5e-3);
}

TEST(Reduction, BuiltinCases) {
  auto cases = builtin_reductions();
  ASSERT_EQ(cases.size(), 4u);
  for (const auto& c : cases) EXPECT_EQ(c.points.size(), 3u) << c.name;
}

TEST(Report, TextAndJson) {
  ValidationReport rep;
  rep.properties = run_property_suite(1, 5);
  ReductionReport rr;
  rr.name = "x";
  rr.points.push_back({{0, 0.1, 1}, 0.5, 0.501, true, true, 0.001, true});
  rep.reductions.push_back(rr);
  EXPECT_TRUE(rep.passed());
  EXPECT_NE(rep.to_text().find("x"), std::string::npos);
  EXPECT_NE(rep.to_json().find("\"passed\""), std::string::npos);
  rep.reductions[0].points[0].pass = false;
  EXPECT_FALSE(rep.passed());
}

}  // namespace
}  // namespace rdc
