#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "prophet/acceptance.hpp"
#include "prophet/bounds.hpp"
#include "prophet/simulator.hpp"

using namespace prophet;

namespace {

const AlphaStrategy kInvE = AlphaStrategy::constant(1.0 / std::numbers::e);

Instance uniforms(std::size_t n) { return Instance(std::vector<Distribution>(n, Distribution::uniform(0, 1))); }

}  // namespace

TEST(MonteCarlo, RejectsZeroTrials) {
  EXPECT_THROW(monte_carlo(uniforms(2), kInvE, Mode::blind, 0, 0), Error);
}

TEST(MonteCarlo, ConstantInverseEOnTenUniforms) {
  const auto r = monte_carlo(uniforms(10), kInvE, Mode::blind, 1000000, 0);
  EXPECT_GE(r.ratio, 1.0 - 1.0 / std::numbers::e - r.ratio_ci_radius);
  EXPECT_NEAR(r.prophet, 10.0 / 11.0, 1e-9);
  EXPECT_DOUBLE_EQ(r.ratio, r.mean_reward / r.prophet);
}

TEST(MonteCarlo, AlphaOneEarnsNothing) {
  for (auto mode : {Mode::blind, Mode::deterministic}) {
    const auto r = monte_carlo(uniforms(4), AlphaStrategy::constant(1.0), mode, 20000, 1);
    EXPECT_EQ(r.mean_reward, 0.0);
  }
}

TEST(MonteCarlo, BitIdenticalAcrossThreadCounts) {
  const Instance inst({Distribution::uniform(0, 1), Distribution::finite({0.0, 1.0, 3.0}, {0.2, 0.5, 0.3}),
                       Distribution::point_mass(0.7)});
  const auto alpha = AlphaStrategy::affine(0.6, -0.5);
  for (auto mode : {Mode::blind, Mode::deterministic}) {
    const auto a = monte_carlo(inst, alpha, mode, 50000, 77, 1);
    const auto b = monte_carlo(inst, alpha, mode, 50000, 77, 3);
    EXPECT_TRUE(acceptance::detail::same_report(a, b));
  }
}

TEST(MonteCarlo, SeedChangesTheStream) {
  const auto a = monte_carlo(uniforms(3), kInvE, Mode::blind, 10000, 1);
  const auto b = monte_carlo(uniforms(3), kInvE, Mode::blind, 10000, 2);
  EXPECT_NE(a.mean_reward, b.mean_reward);
}

TEST(MonteCarlo, AgreesWithExactOnFiniteInstance) {
  const Instance inst({Distribution::finite({0.0, 1.0}, {0.4, 0.6}), Distribution::finite({0.0, 2.0, 5.0}, {0.5, 0.3, 0.2}),
                       Distribution::finite({1.0, 3.0}, {0.7, 0.3})});
  const auto alpha = AlphaStrategy::affine(0.7, -0.6);
  const double exact = exact_eval(inst, alpha);
  const auto r = monte_carlo(inst, alpha, Mode::deterministic, 200000, 3);
  EXPECT_NEAR(r.mean_reward, exact, 3.0 * r.std_error);
}

TEST(ExactEval, PointMassAlwaysTaken) {
  const Instance inst({Distribution::point_mass(1.0)});
  EXPECT_DOUBLE_EQ(exact_eval(inst, AlphaStrategy::affine(1.0, -1.0)), 1.0);
  EXPECT_DOUBLE_EQ(exact_eval(inst, AlphaStrategy::constant(0.0)), 1.0);
}

TEST(ExactEval, TwoBernoulliHandEnumeration) {
  // tau = 1 at both positions; V1 ties there and is accepted w.p. 0.4.
  // order (1,2): 0.5*0.4*1 + 0.8*0.5*2 = 1.0; order (2,1): 0.5*2 + 0.5*0.5*0.4 = 1.1
  const Instance inst({Distribution::finite({0.0, 1.0}, {0.5, 0.5}), Distribution::finite({0.0, 2.0}, {0.5, 0.5})});
  EXPECT_NEAR(exact_eval(inst, AlphaStrategy::constant(0.4)), 1.05, 1e-12);
  // alpha = 0.5 sits at the top of the jump: ties rejected, only V2 = 2 is taken
  EXPECT_NEAR(exact_eval(inst, AlphaStrategy::constant(0.5)), 1.0, 1e-12);
}

TEST(ExactEval, Guards) {
  const Instance big(std::vector<Distribution>(9, Distribution::point_mass(1.0)));
  EXPECT_THROW(exact_eval(big, kInvE), Error);
  EXPECT_THROW(exact_eval(uniforms(2), kInvE), Error);
}

TEST(StopCdf, AlphaOneNeverStops) {
  const auto r = empirical_stop_cdf(uniforms(4), AlphaStrategy::constant(1.0), 10000, 0);
  for (double p : r.cdf) EXPECT_EQ(p, 0.0);
}

TEST(StopCdf, IidTracksUpperBound) {
  const std::size_t n = 6;
  const auto alpha = AlphaStrategy::affine(0.8, -0.7);
  const auto levels = alpha.levels_at(n);
  const auto r = empirical_stop_cdf(uniforms(n), alpha, 200000, 4);
  for (std::size_t k = 1; k <= n; ++k) {
    const auto b = stop_cdf_bounds(levels, k, n);
    EXPECT_NEAR(r.cdf[k - 1], b.upper, r.radius[k - 1] + 1e-12) << "k=" << k;
  }
}

TEST(StopCdf, OneNonzeroTracksLowerBound) {
  const std::size_t n = 6;
  std::vector<Distribution> d(n - 1, Distribution::point_mass(0.0));
  d.push_back(Distribution::uniform(0, 1));
  const auto alpha = AlphaStrategy::affine(0.8, -0.7);
  const auto levels = alpha.levels_at(n);
  const auto r = empirical_stop_cdf(Instance(d), alpha, 200000, 5);
  for (std::size_t k = 1; k <= n; ++k) {
    const auto b = stop_cdf_bounds(levels, k, n);
    EXPECT_NEAR(r.cdf[k - 1], b.lower, r.radius[k - 1] + 1e-12) << "k=" << k;
  }
}

TEST(StopCdf, SandwichOnMixedInstance) {
  const Instance inst({Distribution::uniform(0, 1), Distribution::uniform(0, 4), Distribution::point_mass(0.5),
                       Distribution::finite({0.0, 2.0}, {0.5, 0.5})});
  const auto alpha = AlphaStrategy::constant(0.45);
  const auto levels = alpha.levels_at(4);
  const auto r = empirical_stop_cdf(inst, alpha, 100000, 6);
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto b = stop_cdf_bounds(levels, k, 4);
    EXPECT_GE(r.cdf[k - 1], b.lower - r.radius[k - 1]);
    EXPECT_LE(r.cdf[k - 1], b.upper + r.radius[k - 1]);
  }
}

TEST(Threads, EnvironmentFallback) {
  ::setenv("PROPHET_LAB_THREADS", "3", 1);
  EXPECT_EQ(resolve_threads(0), 3u);
  EXPECT_EQ(resolve_threads(2), 2u);
  ::unsetenv("PROPHET_LAB_THREADS");
  EXPECT_GE(resolve_threads(0), 1u);
}
