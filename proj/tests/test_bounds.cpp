#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "prophet/bounds.hpp"

using namespace prophet;

namespace {

constexpr double kOneMinusInvE = 1.0 - 1.0 / std::numbers::e;

std::vector<AlphaStrategy> zoo() {
  return {AlphaStrategy::constant(1.0 / std::numbers::e),
          AlphaStrategy::constant(0.2),
          AlphaStrategy::constant(0.8),
          AlphaStrategy::affine(0.53, -0.38),
          AlphaStrategy::affine(0.9, -1.2),
          AlphaStrategy::piecewise({0.9, 0.6, 0.5, 0.3, 0.1}),
          AlphaStrategy::tabulated({0.0, 0.2, 0.6, 1.0}, {0.7, 0.5, 0.3, 0.0})};
}

}  // namespace

TEST(ConstantFactor, Examples) {
  EXPECT_NEAR(constant_alpha_factor(1.0 / std::numbers::e), kOneMinusInvE, 1e-15);
  EXPECT_EQ(constant_alpha_factor(1.0), 0.0);
  EXPECT_EQ(constant_alpha_factor(0.0), 0.0);
  EXPECT_DOUBLE_EQ(constant_alpha_factor(0.5), 0.5);
}

TEST(FjDiscrete, ConstantInverseERecoversSingleThreshold) {
  const auto levels = AlphaStrategy::constant(1.0 / std::numbers::e).levels_at(10000);
  EXPECT_NEAR(f_j_discrete(levels, 1), kOneMinusInvE, 1e-4);
}

TEST(FjDiscrete, LastIndexIsMeanOfOneMinusAlpha) {
  const auto levels = AlphaStrategy::affine(0.8, -0.6).levels_at(7);
  double s = 0.0;
  for (double a : levels) s += 1.0 - a;
  EXPECT_NEAR(f_j_discrete(levels, 8), s / 7.0, 1e-15);
}

TEST(FjDiscrete, AffineAtTenThousand) {
  const auto r = f_j_discrete_all(AlphaStrategy::affine(0.53, -0.38).levels_at(10000));
  EXPECT_GE(r.min_value, 0.657);
  EXPECT_EQ(r.per_j.size(), 10001u);
}

TEST(FjDiscrete, ReportInvariants) {
  const auto r = f_j_discrete_all(AlphaStrategy::piecewise({0.9, 0.5, 0.2}).levels_at(30));
  EXPECT_EQ(r.min_value, *std::min_element(r.per_j.begin(), r.per_j.end()));
  EXPECT_EQ(r.per_j[r.argmin_j - 1], r.min_value);
  for (double v : r.per_j) EXPECT_TRUE(std::isfinite(v));
}

TEST(FjDiscrete, AlphaOneAtFirstLevelIsAnError) {
  const std::vector<double> levels{1.0, 0.5, 0.2};
  EXPECT_THROW(f_j_discrete_all(levels), Error);
  const std::vector<double> increasing{0.2, 0.5};
  EXPECT_THROW(f_j_discrete_all(increasing), Error);
}

TEST(FjDiscrete, AgreesWithConstantFactor) {
  for (double p : {0.2, 1.0 / std::numbers::e, 0.5, 0.8}) {
    const auto r = f_j_discrete_all(AlphaStrategy::constant(p).levels_at(10000));
    EXPECT_NEAR(r.min_value, constant_alpha_factor(p), 1e-3) << "p=" << p;
  }
}

TEST(GuaranteeLimit, ConstantInverseE) {
  EXPECT_NEAR(guarantee_limit(AlphaStrategy::constant(1.0 / std::numbers::e)), kOneMinusInvE, 1e-6);
}

TEST(GuaranteeLimit, AffineExceeds0657) { EXPECT_GE(guarantee_limit(AlphaStrategy::affine(0.53, -0.38)), 0.657); }

TEST(GuaranteeLimit, AlphaZeroIsZero) { EXPECT_NEAR(guarantee_limit(AlphaStrategy::constant(0.0)), 0.0, 1e-12); }

TEST(GuaranteeLimit, AlphaOneOnAnIntervalIsAnError) {
  EXPECT_THROW(guarantee_limit(AlphaStrategy::tabulated({0.0, 0.3, 0.3, 1.0}, {1.0, 1.0, 0.4, 0.1})), Error);
}

TEST(GuaranteeLimit, MatchesDiscreteLimit) {
  for (const auto& a : {AlphaStrategy::affine(0.53, -0.38), AlphaStrategy::affine(0.7, -0.5)}) {
    const auto r = f_j_discrete_all(a.levels_at(20000));
    EXPECT_NEAR(r.min_value, guarantee_limit(a), 2e-4);
  }
}

TEST(GuaranteeLimit, NeverExceedsUpperObjective) {
  for (const auto& a : zoo()) EXPECT_LE(guarantee_limit(a), blind_upper_objective(a) + 1e-6);
}

TEST(StopCdfBounds, Examples) {
  const std::vector<double> one{1.0, 1.0, 1.0};
  const auto b1 = stop_cdf_bounds(one, 2, 3);
  EXPECT_EQ(b1.lower, 0.0);
  EXPECT_EQ(b1.upper, 0.0);
  const std::vector<double> zero{0.0, 0.0, 0.0};
  const auto b0 = stop_cdf_bounds(zero, 3, 3);
  EXPECT_DOUBLE_EQ(b0.lower, 1.0);
  EXPECT_DOUBLE_EQ(b0.upper, 1.0);
  const std::vector<double> lv{0.9, 0.6, 0.3};
  const auto b = stop_cdf_bounds(lv, 2, 3);
  EXPECT_NEAR(b.lower, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(b.upper, 1.0 - std::cbrt(0.54), 1e-15);
}

TEST(GFactor, Examples) {
  EXPECT_DOUBLE_EQ(g_factor(30, 0.8, 0), 1.0);
  EXPECT_DOUBLE_EQ(g_factor(30, 0.8, 30), 2.0 / 1.8);
  EXPECT_NEAR(g_factor(30, 0.8, 10), 15.0 / 14.0, 1e-15);
}

TEST(GFactor, NondecreasingAndAtLeastOne) {
  for (std::size_t m : {5u, 30u})
    for (double p : {0.1, 0.5, 0.9})
      for (std::size_t k = 1; k <= m; ++k) {
        EXPECT_GE(g_factor(m, p, k), g_factor(m, p, k - 1));
        EXPECT_GE(g_factor(m, p, k), 1.0);
      }
}

TEST(FjPiecewise, SingleLevel) {
  const std::vector<double> lv{1.0 / std::numbers::e};
  EXPECT_NEAR(f_j_piecewise(lv, 1), kOneMinusInvE, 1e-15);
  EXPECT_NEAR(f_j_piecewise(lv, 2), kOneMinusInvE, 1e-15);
}

TEST(FjPiecewise, LastIsMean) {
  const std::vector<double> lv{0.9, 0.7, 0.4, 0.1};
  EXPECT_NEAR(f_j_piecewise(lv, 5), (0.1 + 0.3 + 0.6 + 0.9) / 4.0, 1e-15);
}

TEST(FjPiecewise, ZeroLevelIsAnError) {
  const std::vector<double> lv{0.5, 0.0};
  EXPECT_THROW(f_j_piecewise_all(lv), Error);
}

TEST(FjPiecewise, DominatesStepInterpolatedDiscrete) {
  const std::vector<std::vector<double>> cases{{0.9, 0.6, 0.3, 0.1}, {0.5, 0.45, 0.4, 0.2, 0.05}, {0.37}};
  for (const auto& lv : cases) {
    const std::size_t m = lv.size();
    const auto pw = f_j_piecewise_all(lv);
    std::vector<double> fine;
    for (double a : lv)
      for (int r = 0; r < 10; ++r) fine.push_back(a);
    const auto disc = f_j_discrete_all(fine);
    for (std::size_t j = 1; j <= m + 1; ++j)
      EXPECT_GE(pw.per_j[j - 1], disc.per_j[(j - 1) * 10] - 5e-3) << "j=" << j;
  }
}

TEST(UpperObjective, Examples) {
  EXPECT_NEAR(blind_upper_objective(AlphaStrategy::constant(1.0 / std::numbers::e)), kOneMinusInvE, 1e-6);
  EXPECT_NEAR(blind_upper_objective(AlphaStrategy::constant(0.0)), 0.0, 1e-12);
}

TEST(Profile, EqualizerCurveIsSampled) {
  const auto p = guarantee_profile(AlphaStrategy::affine(0.53, -0.38));
  ASSERT_EQ(p.x.size(), p.curve.size());
  EXPECT_NEAR(p.inner_inf, *std::min_element(p.curve.begin(), p.curve.end()), 1e-9);
  EXPECT_NEAR(p.first, 1.0 - 0.53 + 0.19, 1e-9);
}
