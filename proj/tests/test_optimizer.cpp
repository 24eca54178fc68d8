#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "prophet/acceptance.hpp"
#include "prophet/optimizer.hpp"

using namespace prophet;

namespace {

double simpson_nodes(const std::vector<double>& f, double h, std::size_t upto) {
  // composite Simpson on f[0..upto], upto even
  double s = f[0] + f[upto];
  for (std::size_t i = 1; i < upto; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
  return s * h / 3.0;
}

}  // namespace

TEST(Maximin, SingleLevelIsInverseE) {
  const auto r = optimize_piecewise(1, 2, 0);
  ASSERT_EQ(r.levels.size(), 1u);
  EXPECT_NEAR(r.levels[0], 1.0 / std::numbers::e, 1e-3);
  EXPECT_NEAR(r.min_value, 1.0 - 1.0 / std::numbers::e, 1e-3);
}

TEST(Maximin, ScoreConsistency) {
  const auto r = optimize_piecewise(6, 2, 1);
  EXPECT_EQ(f_j_piecewise_all(r.levels).min_value, r.min_value);
}

TEST(Maximin, DeterministicGivenSeed) {
  const auto a = optimize_piecewise(4, 2, 7);
  const auto b = optimize_piecewise(4, 2, 7);
  EXPECT_EQ(a.levels, b.levels);
  EXPECT_EQ(a.min_value, b.min_value);
}

TEST(Maximin, ThirtyLevels) {
  const auto& r = acceptance::piecewise30();
  EXPECT_GE(r.min_value, 0.6697);
  EXPECT_EQ(AlphaStrategy::piecewise(r.levels).monotonicity_violation(10001), 0.0);
  for (double a : r.levels) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
  EXPECT_FALSE(r.log.empty());
}

TEST(Maximin, DiscreteMatchesBoundsModule) {
  const auto r = optimize_discrete(12, 2, 0);
  EXPECT_NEAR(f_j_discrete_all(r.levels).min_value, r.min_value, 1e-9);
  EXPECT_GT(r.min_value, 0.64);
}

TEST(EqualizingOde, FixedPointAndEqualizer) {
  const auto init = ode_default_initial(0);
  const auto sol = solve_equalizing_ode(init, 11);
  const auto alpha = sol.alpha();
  EXPECT_EQ(alpha.monotonicity_violation(10001), 0.0);
  const auto prof = guarantee_profile(alpha);
  EXPECT_GE(prof.value, 0.665);
  for (double c : prof.curve) {
    EXPECT_GE(c, 0.6653);
    EXPECT_LE(c, 0.6720);
  }
  const auto more = solve_equalizing_ode(sol, 1);
  EXPECT_LT(std::abs(guarantee_limit(more.alpha()) - prof.value), 1e-3);
  EXPECT_EQ(sol.u_values.front(), 0.0);
  for (std::size_t i = 1; i < sol.u_values.size(); ++i) EXPECT_GE(sol.u_values[i], sol.u_values[i - 1]);
  EXPECT_NEAR(sol.alpha_values.back(), 0.0, 1e-12);
}

TEST(ControlFamily, ZeroForcingIsInfeasible) { EXPECT_FALSE(solve_control_family(0.0, 0.1).feasible); }

TEST(ControlFamily, OutOfBoxIsValidationError) {
  EXPECT_THROW(solve_control_family(3.5, 0.1), Error);
  EXPECT_THROW(solve_control_family(1.0, 0.5), Error);
}

TEST(ControlFamily, IntegralFormResidual) {
  const auto p = solve_control_family(1.2, 1.0 / 30.0);
  ASSERT_TRUE(p.feasible);
  EXPECT_LT(p.beta_curve.back(), 1e-3);
  for (std::size_t i = 1; i < p.beta_curve.size(); ++i) EXPECT_LE(p.beta_curve[i], p.beta_curve[i - 1]);
  const double h = p.t[1] - p.t[0];
  std::vector<double> eg, lb;
  for (std::size_t i = 0; i < p.t.size(); ++i) {
    eg.push_back(std::exp(p.g_curve[i]));
    lb.push_back(std::log(p.beta_curve[i]));
  }
  // beta(t) = beta(t_bar) - K int e^g and g = int ln beta, away from the terminal singularity
  for (std::size_t k : {64u, 512u, 1024u, 1536u}) {
    EXPECT_LT(std::abs(p.beta_curve[k] - p.beta0 + p.K * simpson_nodes(eg, h, k)), 1e-6) << k;
    EXPECT_LT(std::abs(p.g_curve[k] - simpson_nodes(lb, h, k)), 1e-6) << k;
  }
  EXPECT_NEAR(p.objective, p.objective_direct, 1e-6);
}

TEST(ControlFamily, AlphaShape) {
  const auto p = solve_control_family(1.0, 0.1);
  ASSERT_TRUE(p.feasible);
  const auto a = p.alpha();
  EXPECT_EQ(a(0.05), 1.0);
  EXPECT_LT(a(0.5), 1.0);
  EXPECT_NEAR(a(1.0), 0.0, 1e-12);
  EXPECT_EQ(a.monotonicity_violation(10001), 0.0);
}

TEST(Sweep, DefaultGridInRangeAndStable) {
  const auto coarse = sweep_upper_bound(default_K_grid(), default_t_bar_grid(), 2);
  EXPECT_GE(coarse.sup, 0.669);
  EXPECT_LE(coarse.sup, 0.6755);
  EXPECT_GT(coarse.argmax_t_bar, 0.0);
  EXPECT_GT(coarse.feasible, 0u);
  const auto fine = sweep_upper_bound(default_K_grid(121), default_t_bar_grid(41), 2);
  EXPECT_LT(std::abs(fine.sup - coarse.sup), 1e-3);
}

TEST(Sweep, SoundnessChain) {
  const auto s = sweep_upper_bound(default_K_grid(), default_t_bar_grid(), 2);
  EXPECT_LE(acceptance::piecewise30().min_value, s.sup + 1e-3);
}

TEST(Sweep, ThreadCountDoesNotMatter) {
  const auto k = default_K_grid(9);
  const auto t = default_t_bar_grid(5);
  const auto a = sweep_upper_bound(k, t, 1);
  const auto b = sweep_upper_bound(k, t, 3);
  EXPECT_EQ(a.sup, b.sup);
  EXPECT_EQ(a.argmax_K, b.argmax_K);
  EXPECT_EQ(a.argmax_t_bar, b.argmax_t_bar);
}

TEST(Sweep, EmittedAlphasAreFeasible) {
  for (double K : {0.5, 1.5, 2.5})
    for (double tb : {0.0, 0.2}) {
      const auto p = solve_control_family(K, tb);
      if (!p.feasible) continue;
      const auto a = p.alpha();
      EXPECT_EQ(a.monotonicity_violation(10001), 0.0);
      EXPECT_NEAR(blind_upper_objective(a), p.objective, 1e-9);
    }
}
