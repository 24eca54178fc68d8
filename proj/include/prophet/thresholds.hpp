#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "prophet/alpha.hpp"
#include "prophet/core_model.hpp"
#include "prophet/error.hpp"
#include "prophet/rng.hpp"

namespace prophet {

/// Stochastic acceptance at an atom threshold: variable index -> P(accept a tie).
using TieBreak = std::map<std::size_t, double>;

/// Solution of the smoothed-atom equation prod_j (F_j(tau-) + s a_j) = q.
struct TieBreakSolution {
  double s = 0.0;  ///< common interpolation parameter in [0, 1]
  TieBreak accept;
};

/// Acceptance probabilities at an atom threshold.
///
/// Each F_j is smoothed linearly over [tau - eps, tau]; in the eps -> 0 limit
/// every variable with an atom at tau is interpolated with one common
/// parameter s, found by bisection to 1e-12. A variable with atom mass a_j
/// is then accepted on a tie with probability (F_j(tau) - F_j(tau-) - s a_j) / a_j
/// = 1 - s; variables without an atom get no entry.
///
/// Requires cdf_max_left(tau) <= q <= cdf_max(tau).
inline TieBreakSolution solve_tie_break(const Instance& instance, double tau, double target_q) {
  const std::size_t n = instance.size();
  std::vector<double> below(n);
  std::vector<double> mass(n);
  for (std::size_t j = 0; j < n; ++j) {
    below[j] = instance[j].cdf_left(tau);
    mass[j] = instance[j].atom_mass(tau);
  }
  const auto product = [&](double s) {
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j) p *= below[j] + s * mass[j];
    return p;
  };
  const double at0 = product(0.0);
  const double at1 = product(1.0);
  if (!(at0 < at1) || target_q < at0 - 1e-15 || target_q > at1 + 1e-15)
    fail_validation("target outside atom gap");
  double lo = 0.0;
  double hi = 1.0;
  if (target_q <= at0) {
    hi = 0.0;
  } else if (target_q >= at1) {
    lo = 1.0;
  } else {
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (product(mid) >= target_q ? hi : lo) = mid;
    }
  }
  TieBreakSolution out;
  out.s = 0.5 * (lo + hi);
  for (std::size_t j = 0; j < n; ++j)
    if (mass[j] > 0.0) out.accept[j] = std::clamp((instance[j].cdf(tau) - below[j] - out.s * mass[j]) / mass[j], 0.0, 1.0);
  return out;
}

inline TieBreak tie_break_probabilities(const Instance& instance, double tau, double target_q) {
  return solve_tie_break(instance, tau, target_q).accept;
}

/// Thresholds tau_1..tau_n with tie-breaking rules at atom positions.
struct ThresholdSchedule {
  struct AtomRule {
    std::size_t pos = 0;  ///< 0-based position in the arrival sequence
    TieBreak accept;
  };

  std::vector<double> tau;
  std::vector<AtomRule> atoms;  // sorted by pos

  std::size_t size() const noexcept { return tau.size(); }

  const AtomRule* rule_at(std::size_t pos) const {
    auto it = std::lower_bound(atoms.begin(), atoms.end(), pos,
                               [](const AtomRule& r, std::size_t p) { return r.pos < p; });
    return (it != atoms.end() && it->pos == pos) ? &*it : nullptr;
  }

  bool is_nonincreasing() const {
    return std::is_sorted(tau.rbegin(), tau.rend());
  }
};

/// Threshold for level q plus its tie rule when tau sits on a member atom.
struct ResolvedThreshold {
  double tau = 0.0;
  std::optional<TieBreak> tie;
};

inline ResolvedThreshold resolve_threshold(const Instance& instance, double q) {
  const auto qr = instance.quantile_max(q);
  ResolvedThreshold out{qr.threshold, std::nullopt};
  if (qr.threshold == kAcceptAll) return out;
  const auto& at = instance.atoms();
  if (!std::binary_search(at.begin(), at.end(), qr.threshold)) return out;
  // On an atom: a genuine gap gets 1 - s; a level at the top of the jump
  // rejects ties (s = 1), which the solver reproduces.
  const double top = instance.cdf_max(qr.threshold);
  const double bottom = instance.cdf_max_left(qr.threshold);
  if (bottom < top) out.tie = tie_break_probabilities(instance, qr.threshold, std::clamp(q, bottom, top));
  return out;
}

namespace detail {

inline ThresholdSchedule schedule_from_levels(const Instance& instance, std::span<const double> levels) {
  ThresholdSchedule s;
  s.tau.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    auto r = resolve_threshold(instance, std::clamp(levels[i], 0.0, 1.0));
    s.tau.push_back(r.tau);
    if (r.tie) s.atoms.push_back({i, std::move(*r.tie)});
  }
  return s;
}

}  // namespace detail

/// Blind schedule: tau_i solves P(max <= tau_i) = alpha(u_[i]) with u sorted ascending.
inline ThresholdSchedule build_blind(const Instance& instance, const AlphaStrategy& alpha,
                                     std::span<const double> uniforms) {
  require(uniforms.size() == instance.size(), "build_blind needs one uniform per variable");
  std::vector<double> u(uniforms.begin(), uniforms.end());
  std::sort(u.begin(), u.end());
  std::vector<double> levels(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) levels[i] = alpha(u[i]);
  return detail::schedule_from_levels(instance, levels);
}

/// Deterministic blind schedule: P(max <= tau_j) = alpha(j / n).
inline ThresholdSchedule build_deterministic(const Instance& instance, const AlphaStrategy& alpha) {
  const auto levels = alpha.levels_at(instance.size());
  return detail::schedule_from_levels(instance, levels);
}

/// Where and what the gambler took.
struct StopOutcome {
  std::optional<std::size_t> stop_index;  ///< 0-based step; empty when the gambler never stops
  double reward = 0.0;
};

/// Time Threshold Algorithm: stop at the first step with V > tau (strict).
inline StopOutcome run_tta(const ThresholdSchedule& schedule, const PermutationDraw& draw,
                           std::span<const double> realizations) {
  require(realizations.size() == schedule.size() && draw.order.size() == schedule.size(),
          "run_tta needs one realization and one slot per threshold");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const double v = realizations[draw.order[i]];
    if (v > schedule.tau[i]) return {i, v};
  }
  return {};
}

inline constexpr std::uint64_t kTieStream = 0x7b1e;

/// Stochastic TTA: strict exceedance stops; a tie at tau_i stops with the
/// registered acceptance probability, drawn from a stream seeded by `seed`.
inline StopOutcome run_stochastic_tta(const ThresholdSchedule& schedule, const PermutationDraw& draw,
                                      std::span<const double> realizations, std::uint64_t seed) {
  require(realizations.size() == schedule.size() && draw.order.size() == schedule.size(),
          "run_stochastic_tta needs one realization and one slot per threshold");
  Rng ties(derive_seed(seed, kTieStream));
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const std::size_t j = draw.order[i];
    const double v = realizations[j];
    if (v > schedule.tau[i]) return {i, v};
    if (v == schedule.tau[i]) {
      const auto* rule = schedule.rule_at(i);
      if (rule == nullptr) fail_validation("unresolved tie");
      auto it = rule->accept.find(j);
      if (it == rule->accept.end()) fail_validation("unresolved tie");
      if (ties.uniform() < it->second) return {i, v};
    }
  }
  return {};
}

}  // namespace prophet
