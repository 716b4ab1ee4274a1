#include <gtest/gtest.h>

#include "rdc/error.hpp"
#include "rdc/scenario.hpp"

namespace rdc {
namespace {

TEST(Validate, BuiltinsAreValid) {
  for (double p : {0.0, 0.2, 0.5}) EXPECT_TRUE(validate(dsbs_binary_product(p)).empty());
  EXPECT_TRUE(validate(reduction_wyner_ziv(0.2)).empty());
  EXPECT_TRUE(validate(reduction_wyner_ziv(0.1, 3)).empty());
  EXPECT_TRUE(validate(reduction_vending_machine(0.1)).empty());
  EXPECT_TRUE(validate(reduction_vending_machine(0.1, false)).empty());
  EXPECT_TRUE(validate(reduction_heegard_berger(0.2, 0.3)).empty());
}

TEST(Validate, ChannelSliceDefectNamesIndex) {
  auto s = dsbs_binary_product(0.2);
  // slice (x=1, y=0, a=1) -> 0.9 total
  s.channel[((1 * 2 + 0) * 2 + 1) * 2 + 0] = 0.9;
  auto v = validate(s);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].index, (std::vector<std::size_t>{1, 0, 1}));
  EXPECT_NE(v[0].what.find("channel"), std::string::npos);
  EXPECT_THROW(require_valid(s), InputError);
}

TEST(Validate, NegativeDistortionNamesEntry) {
  auto s = dsbs_binary_product(0.2);
  s.d2[1 * 2 + 0] = -0.5;
  auto v = validate(s);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].index, (std::vector<std::size_t>{1, 0}));
  EXPECT_NE(v[0].to_string().find("d2"), std::string::npos);
}

TEST(Validate, ReportsEveryDefect) {
  auto s = dsbs_binary_product(0.2);
  s.cost[0] = -1;
  s.f2[3] = 5;
  s.source[0] += 0.1;
  EXPECT_EQ(validate(s).size(), 3u);
  s.sizes.z = 0;
  EXPECT_EQ(validate(s).size(), 1u);
}

TEST(Dsbs, Structure) {
  const double p = 0.2;
  auto s = dsbs_binary_product(p);
  EXPECT_DOUBLE_EQ(s.p_xy(1, 1), (1 - p) / 2);
  EXPECT_NEAR(s.p_xy(0, 1) + s.p_xy(1, 0), p, 1e-15);
  auto px = s.p_x();
  EXPECT_DOUBLE_EQ(px[0], 0.5);
  EXPECT_DOUBLE_EQ(s.p_xy(0, 0) + s.p_xy(1, 0), 0.5);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) {
      EXPECT_EQ(s.p_z(x, y, 0, 1), 1.0);
      EXPECT_EQ(s.p_z(x, y, 1, y), 1.0);
      for (std::size_t z = 0; z < 2; ++z) EXPECT_EQ(s.target2(x, y, z), x * y);
    }
  EXPECT_EQ(s.cost, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(d1_max(s), 0.0);
  EXPECT_THROW(dsbs_binary_product(0.6), InputError);
}

TEST(Dsbs, DegenerateCrossover) {
  auto s = dsbs_binary_product(0.0);
  EXPECT_EQ(s.p_xy(0, 1), 0.0);
  EXPECT_EQ(s.p_xy(1, 0), 0.0);
}

TEST(D1Max, Examples) {
  auto s = dsbs_binary_product(0.2);
  s.sizes.t1 = s.sizes.t1hat = 2;
  s.f1 = s.f2;
  s.d1 = s.d2;
  ASSERT_TRUE(validate(s).empty());
  EXPECT_NEAR(d1_max(s), 0.4, 1e-15);

  // Hamming on a uniform binary target.
  auto hb = reduction_heegard_berger(0.2, 0.3);
  EXPECT_NEAR(d1_max(hb), 0.5, 1e-15);
}

TEST(Reductions, Structure) {
  auto wz = reduction_wyner_ziv(0.2, 3);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t a = 1; a < 3; ++a)
      for (std::size_t z = 0; z < wz.sizes.z; ++z)
        EXPECT_EQ(wz.p_z(x, 0, a, z), wz.p_z(x, 0, 0, z));
  EXPECT_EQ(d1_max(wz), 0.0);

  auto vm = reduction_vending_machine(0.1);
  EXPECT_EQ(vm.p_xy(0, 1) + vm.p_xy(1, 0), 0.0);

  auto hb = reduction_heegard_berger(0.2, 0.3);
  EXPECT_EQ(hb.f1, hb.f2);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t z = 0; z < hb.sizes.z; ++z) {
      EXPECT_EQ(hb.target1(x, 0, z), x);
      EXPECT_EQ(hb.p_z(x, 0, 1, z), hb.p_z(x, 0, 0, z));
    }
}

TEST(Reductions, KeepAndDropActions) {
  auto s = dsbs_binary_product(0.2);
  auto one = keep_action(s, 1);
  EXPECT_EQ(one.sizes.a, 1u);
  EXPECT_EQ(one.cost, std::vector<double>{1.0});
  EXPECT_EQ(one.p_z(0, 1, 0, 1), 1.0);
  EXPECT_TRUE(validate(one).empty());
  auto none = drop_actions(s);
  EXPECT_EQ(none.cost, std::vector<double>{0.0});
  EXPECT_EQ(none.p_z(0, 0, 0, 1), 1.0);
  EXPECT_THROW(keep_action(s, 2), InputError);
}

}  // namespace
}  // namespace rdc
