#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "prophet/adversarial.hpp"
#include "prophet/core_model.hpp"

using namespace prophet;

namespace {

Instance two_uniforms() { return Instance({Distribution::uniform(0, 1), Distribution::uniform(0, 1)}); }

}  // namespace

TEST(Distribution, RejectsBadParameters) {
  EXPECT_THROW(Distribution::uniform(1.0, 1.0), Error);
  EXPECT_THROW(Distribution::finite({0.0, 1.0}, {0.5, 0.6}), Error);
  EXPECT_THROW(Distribution::finite({0.0, 1.0}, {-0.1, 1.1}), Error);
  EXPECT_THROW(Distribution::mixture({1.0}, {}), Error);
}

TEST(Distribution, CdfLeftAndAtomMass) {
  const auto d = Distribution::finite({0.0, 2.0}, {0.25, 0.75});
  EXPECT_DOUBLE_EQ(d.cdf(2.0), 1.0);
  EXPECT_DOUBLE_EQ(d.cdf_left(2.0), 0.25);
  EXPECT_DOUBLE_EQ(d.atom_mass(2.0), 0.75);
  EXPECT_DOUBLE_EQ(d.atom_mass(1.0), 0.0);
  EXPECT_DOUBLE_EQ(d.mean(), 1.5);
}

TEST(Distribution, MixtureCarriesComponentAtoms) {
  const auto d = Distribution::mixture({0.1, 0.9}, {Distribution::point_mass(10.0), Distribution::uniform(0.0, 1.0)});
  EXPECT_NEAR(d.cdf(0.5), 0.45, 1e-15);
  EXPECT_NEAR(d.atom_mass(10.0), 0.1, 1e-15);
  EXPECT_NEAR(d.mean(), 1.0 + 0.45, 1e-12);
  EXPECT_FALSE(d.is_discrete());
}

TEST(Distribution, QuantileInvertsCdf) {
  const auto d = Distribution::uniform(2.0, 6.0);
  EXPECT_NEAR(d.quantile(0.25), 3.0, 1e-12);
  const auto f = Distribution::finite({1.0, 3.0}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(f.quantile(0.5), 1.0);
  EXPECT_DOUBLE_EQ(f.quantile(0.7), 3.0);
}

TEST(CdfMax, BelowPointMassIsZero) { EXPECT_DOUBLE_EQ(Instance({Distribution::point_mass(1.0)}).cdf_max(0.5), 0.0); }

TEST(CdfMax, ProductOfIndependentCdfs) { EXPECT_DOUBLE_EQ(two_uniforms().cdf_max(0.5), 0.25); }

TEST(CdfMax, HardGeneralSpikesAtZero) {
  const std::size_t n = 1000;
  std::vector<Distribution> d(n, Distribution::finite({0.0, 1000.0}, {1.0 - 1e-6, 1e-6}));
  EXPECT_NEAR(Instance(d).cdf_max(0.0), std::pow(1.0 - 1e-6, 1000.0), 1e-12);
}

TEST(QuantileMax, UniformIdentity) {
  const auto r = Instance({Distribution::uniform(0, 1)}).quantile_max(1.0 / std::numbers::e);
  EXPECT_NEAR(r.threshold, 1.0 / std::numbers::e, 1e-12);
  EXPECT_FALSE(r.is_atom);
}

TEST(QuantileMax, PointMassIsAtom) {
  const auto r = Instance({Distribution::point_mass(1.0)}).quantile_max(0.5);
  EXPECT_DOUBLE_EQ(r.threshold, 1.0);
  EXPECT_TRUE(r.is_atom);
}

TEST(QuantileMax, TwoPointProductLaw) {
  const Instance inst({Distribution::finite({0.0, 2.0}, {0.5, 0.5}), Distribution::finite({0.0, 3.0}, {0.5, 0.5})});
  const auto r = inst.quantile_max(0.3);
  EXPECT_DOUBLE_EQ(r.threshold, 2.0);
  EXPECT_TRUE(r.is_atom);
}

TEST(QuantileMax, ZeroLevelAcceptsEverything) {
  EXPECT_EQ(two_uniforms().quantile_max(0.0).threshold, kAcceptAll);
  EXPECT_THROW(two_uniforms().quantile_max(1.5), Error);
}

TEST(QuantileMax, RoundTripOnMixedInstance) {
  const Instance inst({Distribution::uniform(0, 2),
                       Distribution::mixture({0.3, 0.7}, {Distribution::point_mass(1.0), Distribution::uniform(0.5, 1.5)})});
  for (double q : {0.05, 0.2, 0.45, 0.8, 0.99}) {
    const auto r = inst.quantile_max(q);
    EXPECT_LE(inst.cdf_max_left(r.threshold), q + 1e-12);
    EXPECT_GE(inst.cdf_max(r.threshold), q - 1e-12);
  }
}

TEST(ProphetValue, TrapClosedForm) {
  const std::size_t n = 100;
  const auto named = make_named(HardTag::single_threshold_trap, {n, 1e-3, 0.0});
  EXPECT_NEAR(prophet_value(named.instance), 2.0 - 1.0 / 100.0, 1e-9);
  EXPECT_NEAR(*named.prophet, prophet_value(named.instance), 1e-9);
}

TEST(ProphetValue, HardGeneralTendsToOnePlusA) {
  const double a = std::numbers::sqrt3 - 1.0;
  EXPECT_NEAR(hard_general_prophet(10000, a), 1.0 + a, 1e-3);
  EXPECT_NEAR(hard_general_prophet(1000000, a), 1.0 + a, 1e-5);
}

TEST(ProphetValue, UniformMean) { EXPECT_NEAR(prophet_value(Instance({Distribution::uniform(0, 1)})), 0.5, 1e-9); }

TEST(ProphetValue, QuadratureMatchesClosedForm) {
  // E[max of two U(0,1)] = 2/3
  EXPECT_NEAR(prophet_value(two_uniforms()), 2.0 / 3.0, 1e-9);
}

TEST(Sampling, PointMass) {
  const auto v = sample_instance(Instance({Distribution::point_mass(3.0)}), 17);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], 3.0);
}

TEST(Sampling, Deterministic) {
  const auto inst = two_uniforms();
  EXPECT_EQ(sample_instance(inst, 5), sample_instance(inst, 5));
  EXPECT_NE(sample_instance(inst, 5), sample_instance(inst, 6));
}

TEST(Sampling, UniformMeanLln) {
  const auto d = Distribution::uniform(0, 1);
  Rng rng(42);
  double s = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) s += d.sample(rng);
  EXPECT_NEAR(s / n, 0.5, 0.002);
}

TEST(Permutation, FisherYatesIsPermutation) {
  Rng rng(1);
  for (int r = 0; r < 100; ++r) {
    const auto p = PermutationDraw::random(7, rng, true);
    EXPECT_TRUE(p.is_permutation());
    EXPECT_EQ(p.uniforms.size(), 7u);
  }
}
