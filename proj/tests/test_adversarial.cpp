#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "prophet/adversarial.hpp"
#include "prophet/simulator.hpp"

using namespace prophet;

namespace {

const double kA = std::numbers::sqrt3 - 1.0;
const AlphaStrategy kInvE = AlphaStrategy::constant(1.0 / std::numbers::e);

}  // namespace

TEST(MakeNamed, NearDeterministicProphet) {
  const auto n = make_named(HardTag::near_deterministic, {1, 0.1, 0.0});
  EXPECT_EQ(*n.prophet, 1.0);
  EXPECT_NEAR(prophet_value(n.instance), 1.0, 1e-9);
}

TEST(MakeNamed, HardGeneralProphet) {
  for (std::size_t n : {5u, 50u}) {
    const auto named = make_named(HardTag::hard_general, {n, 1e-3, 0.6});
    const double q = 1.0 - 1.0 / static_cast<double>(n * n);
    const double qn = std::pow(q, static_cast<double>(n));
    EXPECT_NEAR(*named.prophet, static_cast<double>(n) * (1.0 - qn) + qn * 0.6, 1e-12);
    EXPECT_NEAR(prophet_value(named.instance), *named.prophet, 1e-9);
    EXPECT_EQ(named.instance.size(), n + 1);
  }
}

TEST(MakeNamed, IidSpikeMiddleBranch) {
  const double eps = 1e-3;
  const auto named = make_named(HardTag::iid_spike, {20, eps, 0.0});
  for (double t : {eps, 1.0, 500.0, 1.0 / eps - 1.0})
    EXPECT_NEAR(named.instance.cdf_max(t), std::pow(1.0 - eps, 20.0), 1e-12);
  EXPECT_NEAR(prophet_value(named.instance), *named.prophet, 1e-9);
}

TEST(MakeNamed, RangeChecks) {
  EXPECT_THROW(make_named(HardTag::near_deterministic, {1, 0.7, 0.0}), Error);
  EXPECT_THROW(make_named(HardTag::hard_general, {5, 1e-3, 1.5}), Error);
  EXPECT_THROW(make_named(HardTag::single_threshold_trap, {1, 1e-3, 0.0}), Error);
  EXPECT_THROW(parse_tag("nope"), Error);
}

TEST(BlindValues, NearDeterministic) {
  EXPECT_NEAR(blind_value_near_deterministic(kInvE), 1.0 - 1.0 / std::numbers::e, 1e-9);
  EXPECT_NEAR(blind_value_near_deterministic(AlphaStrategy::constant(1.0)), 0.0, 1e-12);
}

TEST(BlindValues, IidSpike) {
  EXPECT_NEAR(blind_value_iid_spike(kInvE), 1.0 - 1.0 / std::numbers::e, 1e-9);
  EXPECT_NEAR(blind_value_iid_spike(AlphaStrategy::constant(1.0 - 1e-9)), 1.0, 1e-6);
}

TEST(BlindValues, NearDeterministicMatchesMonteCarlo) {
  const auto named = make_named(HardTag::near_deterministic, {1, 1e-3, 0.0});
  const auto alpha = AlphaStrategy::affine(0.53, -0.38);
  const auto r = monte_carlo(named.instance, alpha, Mode::blind, 1000000, 0);
  EXPECT_NEAR(r.ratio, blind_value_near_deterministic(alpha), r.ratio_ci_radius + 1e-3);
}

TEST(BlindValues, IidSpikeMatchesMonteCarlo) {
  // The closed form is the eps -> 0 value normalized by E[max] -> n.
  const std::size_t n = 200;
  const auto named = make_named(HardTag::iid_spike, {n, 1e-3, 0.0});
  const auto r = monte_carlo(named.instance, kInvE, Mode::blind, 1000000, 0);
  EXPECT_NEAR(r.mean_reward / static_cast<double>(n), blind_value_iid_spike(kInvE), 0.01);
}

TEST(BlindValues, WitnessesNeverBeatTheGuarantee) {
  for (const auto& a : {kInvE, AlphaStrategy::affine(0.53, -0.38), AlphaStrategy::piecewise({0.8, 0.5, 0.3, 0.1}),
                        AlphaStrategy::affine(0.95, -0.95)}) {
    const double g = guarantee_limit(a);
    EXPECT_GE(std::min(blind_value_near_deterministic(a), blind_value_iid_spike(a)), g - 1e-6);
  }
}

TEST(DpHardGeneral, ZeroConstant) {
  const std::size_t n = 50;
  const double q = 1.0 - 1.0 / 2500.0;
  EXPECT_NEAR(dp_value_hard_general(n, 0.0).value, 50.0 * (1.0 - std::pow(q, 50.0)), 1e-12);
}

TEST(DpHardGeneral, UnitConstantTakenImmediately) {
  for (std::size_t n : {10u, 1000u}) EXPECT_EQ(dp_value_hard_general(n, 1.0).cutoff, 1u);
}

TEST(DpHardGeneral, RatioAtSqrtThreeMinusOne) {
  const auto dp = dp_value_hard_general(10000, kA);
  const double ratio = dp.value / hard_general_prophet(10000, kA);
  EXPECT_LE(ratio, kA + 0.01);
  EXPECT_NEAR(hard_general_limit_ratio(kA), kA, 1e-12);
}

TEST(DpHardGeneral, ContinuationBoundHolds) {
  // n[1 - (1 - 1/n^2)^{i-1}] <= (i-1)/n
  const std::size_t n = 300;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 1; i <= n + 1; ++i)
    EXPECT_LE(dn * (1.0 - std::pow(1.0 - 1.0 / (dn * dn), static_cast<double>(i - 1))),
              static_cast<double>(i - 1) / dn + 1e-12);
}

TEST(DpHardGeneral, RatioWorstNearSqrtThreeMinusOne) {
  // the adversary picks a to minimize the optimal ratio
  double best = 2.0, best_a = -1.0;
  for (int k = 0; k <= 10; ++k) {
    const double a = 0.1 * k;
    const double r = dp_value_hard_general(10000, a).value / hard_general_prophet(10000, a);
    if (r < best) {
      best = r;
      best_a = a;
    }
  }
  EXPECT_NEAR(best_a, 0.7, 1e-12);
  EXPECT_NEAR(best, 0.732, 2e-3);
}

TEST(DpSmall, SingleVariable) {
  const Instance inst({Distribution::finite({0.0, 2.0, 5.0}, {0.2, 0.5, 0.3})});
  EXPECT_NEAR(dp_optimal_small(inst), 2.5, 1e-12);
}

TEST(DpSmall, TwoPointMasses) {
  EXPECT_NEAR(dp_optimal_small(Instance({Distribution::point_mass(1.0), Distribution::point_mass(2.0)})), 2.0, 1e-12);
}

TEST(DpSmall, AgreesWithHardGeneralDp) {
  for (double a : {0.0, 0.3, 0.7, 1.0}) {
    const auto named = make_named(HardTag::hard_general, {6, 1e-3, a});
    EXPECT_NEAR(dp_optimal_small(named.instance), dp_value_hard_general(6, a).value, 1e-9) << "a=" << a;
  }
}

TEST(DpSmall, DominatesBlindStrategies) {
  const auto named = make_named(HardTag::single_threshold_trap, {6, 1e-3, 0.0});
  const double opt = dp_optimal_small(named.instance);
  for (const auto& a : {kInvE, AlphaStrategy::affine(0.53, -0.38)}) {
    const auto r = monte_carlo(named.instance, a, Mode::blind, 200000, 1);
    EXPECT_LE(r.mean_reward, opt + 3.0 * r.std_error);
  }
}

TEST(DpSmall, SizeGuard) {
  EXPECT_THROW(dp_optimal_small(Instance(std::vector<Distribution>(9, Distribution::point_mass(1.0)))), Error);
  EXPECT_THROW(dp_optimal_small(Instance({Distribution::uniform(0, 1)})), Error);
}

TEST(Trap, FixedThresholdsStayNearHalf) {
  const std::size_t n = 200;
  const auto named = make_named(HardTag::single_threshold_trap, {n, 1e-3, 0.0});
  for (double tau : {0.5, 1.0}) {
    const auto r = simulate_schedule(named.instance, single_threshold_schedule(named.instance, tau, 0.0), 100000, 2);
    EXPECT_LE(r.ratio, 0.52);
  }
}
