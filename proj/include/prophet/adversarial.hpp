#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prophet/alpha.hpp"
#include "prophet/bounds.hpp"
#include "prophet/core_model.hpp"
#include "prophet/error.hpp"
#include "prophet/thresholds.hpp"

namespace prophet {

enum class HardTag { near_deterministic, iid_spike, single_threshold_trap, hard_general };

inline const char* to_string(HardTag t) {
  switch (t) {
    case HardTag::near_deterministic: return "near_deterministic";
    case HardTag::iid_spike: return "iid_spike";
    case HardTag::single_threshold_trap: return "single_threshold_trap";
    case HardTag::hard_general: return "hard_general";
  }
  return "?";
}

inline HardTag parse_tag(const std::string& s) {
  for (auto t : {HardTag::near_deterministic, HardTag::iid_spike, HardTag::single_threshold_trap, HardTag::hard_general})
    if (s == to_string(t)) return t;
  fail_validation("unknown tag '" + s +
                  "' (expected near_deterministic|iid_spike|single_threshold_trap|hard_general)");
}

struct HardParams {
  std::size_t n = 2;
  double eps = 1e-3;
  double a = 0.0;
};

/// A named hard instance with whatever closed forms are known for it.
struct NamedInstance {
  HardTag tag;
  HardParams params;
  Instance instance;
  std::optional<double> prophet;      ///< E[max]
  std::optional<double> optimal;      ///< optimal online value
};

/// E[max] of the last construction: n[1 - q^n] + q^n a with q = 1 - 1/n^2.
inline double hard_general_prophet(std::size_t n, double a) {
  const double dn = static_cast<double>(n);
  const double qn = std::exp(dn * std::log1p(-1.0 / (dn * dn)));
  return dn * (1.0 - qn) + qn * a;
}

/// (1 + a^2/2) / (1 + a): the n -> infinity ratio of the last construction.
inline double hard_general_limit_ratio(double a) { return (1.0 + 0.5 * a * a) / (1.0 + a); }

struct DpHardResult {
  double value = 0.0;
  std::size_t cutoff = 0;  ///< accept a iff it arrives at position >= cutoff (n + 2: never)
};

/// Exact optimal value on hard_general(n, a).
///
/// Spikes (value n) are always taken. The constant a, met at position i with
/// n + 1 - i variables still unseen, is taken iff the continuation value
/// n[1 - q^{n+1-i}] is below a; the value averages the two conditional
/// expectations over the position of the constant.
inline DpHardResult dp_value_hard_general(std::size_t n, double a) {
  require(n >= 2, "n must be >= 2");
  require(a >= 0.0 && a <= 1.0, "a must lie in [0, 1]");
  const double dn = static_cast<double>(n);
  const double lq = std::log1p(-1.0 / (dn * dn));
  const auto qpow = [&](std::size_t k) { return std::exp(static_cast<double>(k) * lq); };
  DpHardResult r;
  r.cutoff = n + 2;
  for (std::size_t i = 1; i <= n + 1; ++i)
    if (dn * (1.0 - qpow(n + 1 - i)) < a) {
      r.cutoff = i;
      break;
    }
  const double reject_all = dn * (1.0 - qpow(n));
  double sum = static_cast<double>(std::min(r.cutoff, n + 2) - 1) * reject_all;
  for (std::size_t i = r.cutoff; i <= n + 1; ++i) {
    const double q = qpow(i - 1);
    sum += dn * (1.0 - q) + q * a;
  }
  r.value = sum / (dn + 1.0);
  return r;
}

/// Materializes a named hard instance.
inline NamedInstance make_named(HardTag tag, const HardParams& p) {
  switch (tag) {
    case HardTag::near_deterministic: {
      require(p.eps > 0.0 && p.eps < 0.5, "eps must lie in (0, 0.5)");
      return {tag, p, Instance({Distribution::uniform(1.0 - p.eps, 1.0 + p.eps)}), 1.0, 1.0};
    }
    case HardTag::iid_spike: {
      require(p.eps > 0.0 && p.eps < 0.5, "eps must lie in (0, 0.5)");
      require(p.n >= 2, "n must be >= 2");
      const auto one = Distribution::mixture({p.eps, 1.0 - p.eps},
                                             {Distribution::point_mass(1.0 / p.eps), Distribution::uniform(0.0, p.eps)});
      const double dn = static_cast<double>(p.n);
      const double none = std::exp(dn * std::log1p(-p.eps));
      // spike if any; otherwise the max of n uniforms on [0, eps]
      const double prophet = (1.0 - none) / p.eps + none * p.eps * dn / (dn + 1.0);
      return {tag, p, Instance(std::vector<Distribution>(p.n, one)), prophet, std::nullopt};
    }
    case HardTag::single_threshold_trap: {
      require(p.n >= 2, "n must be >= 2");
      const double dn = static_cast<double>(p.n);
      std::vector<Distribution> d(p.n - 1, Distribution::point_mass(1.0));
      d.push_back(Distribution::finite({0.0, dn}, {1.0 - 1.0 / dn, 1.0 / dn}));
      return {tag, p, Instance(std::move(d)), 2.0 - 1.0 / dn, std::nullopt};
    }
    case HardTag::hard_general: {
      require(p.n >= 2, "n must be >= 2");
      require(p.a >= 0.0 && p.a <= 1.0, "a must lie in [0, 1]");
      const double dn = static_cast<double>(p.n);
      std::vector<Distribution> d(p.n, Distribution::finite({0.0, dn}, {1.0 - 1.0 / (dn * dn), 1.0 / (dn * dn)}));
      d.push_back(Distribution::point_mass(p.a));
      return {tag, p, Instance(std::move(d)), hard_general_prophet(p.n, p.a), dp_value_hard_general(p.n, p.a).value};
    }
  }
  fail_validation("unknown tag");
}

/// int_0^1 (1 - alpha): the eps -> 0 blind value on near_deterministic(eps).
inline double blind_value_near_deterministic(const AlphaStrategy& alpha, std::size_t grid_size = 1024) {
  return detail::refine([&](std::size_t panels) { return detail::build_profile(alpha, panels).area.back(); },
                        grid_size);
}

/// int_0^1 exp(int_0^s ln alpha) ds: the limit blind value on iid_spike.
inline double blind_value_iid_spike(const AlphaStrategy& alpha, std::size_t grid_size = 1024) {
  return detail::refine(
      [&](std::size_t panels) { return detail::build_profile(alpha, panels).survival.front(); }, grid_size);
}

/// Optimal stopping value with a uniformly random arrival order, by backward
/// induction over the set of variables not yet seen:
/// W(S) = (1/|S|) sum_{i in S} E[max(V_i, W(S \ {i}))], W(empty) = 0.
inline double dp_optimal_small(const Instance& instance) {
  const std::size_t n = instance.size();
  require(instance.is_discrete(), "dp_optimal_small needs a purely atomic instance");
  require(n <= 8, "dp_optimal_small is limited to n <= 8");
  double states = 1.0;
  for (const auto& d : instance.dists()) states *= static_cast<double>(d.discrete_support().size());
  require(states <= 1e6, "dp_optimal_small: product state space exceeds 1e6");
  std::vector<std::vector<std::pair<double, double>>> sup(n);
  for (std::size_t i = 0; i < n; ++i) sup[i] = instance[i].discrete_support();
  const std::size_t full = std::size_t{1} << n;
  std::vector<double> W(full, 0.0);
  for (std::size_t s = 1; s < full; ++s) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(s >> i & 1u)) continue;
      ++count;
      const double cont = W[s & ~(std::size_t{1} << i)];
      for (const auto& [v, pr] : sup[i]) acc += pr * std::max(v, cont);
    }
    W[s] = acc / static_cast<double>(count);
  }
  return W[full - 1];
}

/// A single threshold at tau for every position, ties at tau accepted with
/// probability `accept` for every variable carrying an atom there.
inline ThresholdSchedule single_threshold_schedule(const Instance& instance, double tau, double accept) {
  require(accept >= 0.0 && accept <= 1.0, "acceptance must lie in [0, 1]");
  ThresholdSchedule s;
  s.tau.assign(instance.size(), tau);
  TieBreak rule;
  for (std::size_t j = 0; j < instance.size(); ++j)
    if (instance[j].atom_mass(tau) > 0.0) rule[j] = accept;
  if (!rule.empty())
    for (std::size_t i = 0; i < instance.size(); ++i) s.atoms.push_back({i, rule});
  return s;
}

}  // namespace prophet
