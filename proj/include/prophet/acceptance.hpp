#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "prophet/adversarial.hpp"
#include "prophet/alpha.hpp"
#include "prophet/bounds.hpp"
#include "prophet/core_model.hpp"
#include "prophet/optimizer.hpp"
#include "prophet/rng.hpp"
#include "prophet/simulator.hpp"

namespace prophet::acceptance {

struct Criterion {
  std::string id;
  std::string title;
  std::string constant;  ///< reference constant, empty for property checks
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double limit = 0.0;  ///< wall-clock budget in seconds
};

// --- random instances and the small zoo --------------------------------------

/// Finite-support law with 1..3 atoms on [0, 4].
inline Distribution random_finite(Rng& rng) {
  const std::size_t k = 1 + static_cast<std::size_t>(rng.below(3));
  std::vector<double> v, p;
  double x = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    x += 0.25 + std::floor(rng.uniform() * 8.0) * 0.25;
    v.push_back(std::round(x * 4.0) / 4.0);
    p.push_back(0.2 + rng.uniform());
  }
  double s = 0.0;
  for (double q : p) s += q;
  for (double& q : p) q /= s;
  if (rng.uniform() < 0.3) {  // put an atom at zero
    v.insert(v.begin(), 0.0);
    for (double& q : p) q *= 0.6;
    p.insert(p.begin(), 0.4);
  }
  return Distribution::finite(v, p);
}

/// Any of the supported kinds.
inline Distribution random_distribution(Rng& rng) {
  switch (rng.below(4)) {
    case 0: {
      const double lo = rng.uniform();
      return Distribution::uniform(lo, lo + 0.1 + 2.0 * rng.uniform());
    }
    case 1:
      return random_finite(rng);
    case 2:
      return Distribution::mixture({0.3, 0.7}, {Distribution::point_mass(3.0 * rng.uniform()),
                                                Distribution::uniform(0.0, 1.0 + rng.uniform())});
    default:
      return Distribution::point_mass(0.5 + rng.uniform());
  }
}

inline Instance random_instance(Rng& rng, std::size_t n, bool finite_only) {
  std::vector<Distribution> d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(finite_only ? random_finite(rng) : random_distribution(rng));
  return Instance(std::move(d));
}

struct ZooEntry {
  std::string name;
  Instance instance;
};

/// Small purely atomic instances the exact optimum can be computed on.
inline std::vector<ZooEntry> small_zoo() {
  std::vector<ZooEntry> zoo;
  zoo.push_back({"hard_general(5,0.7)", make_named(HardTag::hard_general, {5, 1e-3, 0.7}).instance});
  zoo.push_back({"hard_general(6,sqrt3-1)",
                 make_named(HardTag::hard_general, {6, 1e-3, std::numbers::sqrt3 - 1.0}).instance});
  zoo.push_back({"single_threshold_trap(6)", make_named(HardTag::single_threshold_trap, {6, 0, 0}).instance});
  {
    const double eps = 0.2;  // atomic counterpart of iid_spike
    zoo.push_back({"iid_spike_atomic(6,0.2)",
                   Instance(std::vector<Distribution>(6, Distribution::finite({0.0, 1.0 / eps}, {1.0 - eps, eps})))});
  }
  Rng rng(derive_seed(2024, 0x200));
  for (int i = 0; i < 4; ++i)
    zoo.push_back({"random_finite_" + std::to_string(i), random_instance(rng, 3 + rng.below(4), true)});
  return zoo;
}

/// The optimized m = 30 strategy, shared by several checks.
inline const MaximinResult& piecewise30() {
  static const MaximinResult r = optimize_piecewise(30, 4, 0);
  return r;
}

// --- runner -------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

template <class Body>
Criterion timed(std::string id, std::string title, std::string constant, double limit, const Body& body) {
  Criterion c{std::move(id), std::move(title), std::move(constant), false, "", 0.0, limit};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.pass = body(c.detail);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("error: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.seconds >= limit) {
    c.pass = false;
    c.detail += " [over time budget]";
  }
  return c;
}

inline bool same_report(const SimReport& a, const SimReport& b) {
  return a.trials == b.trials && a.seed == b.seed &&
         std::memcmp(&a.mean_reward, &b.mean_reward, sizeof(double)) == 0 &&
         std::memcmp(&a.std_error, &b.std_error, sizeof(double)) == 0 &&
         std::memcmp(&a.ratio, &b.ratio, sizeof(double)) == 0;
}

}  // namespace detail

inline Criterion criterion1() {
  return detail::timed("1", "single-threshold guarantee", "0.6321", 1.0, [](std::string& d) {
    const double v = guarantee_limit(AlphaStrategy::constant(std::exp(-1.0)));
    const double target = 1.0 - std::exp(-1.0);
    d = "guarantee=" + detail::fmt(v, 10) + " target=" + detail::fmt(target, 10);
    return std::abs(v - target) <= 1e-6;
  });
}

inline Criterion criterion2() {
  return detail::timed("2", "affine strategy 0.53-0.38x", "0.657", 1.0, [](std::string& d) {
    const double v = guarantee_limit(AlphaStrategy::affine(0.53, -0.38));
    d = "guarantee=" + detail::fmt(v, 8) + " >= 0.657";
    return v >= 0.657;
  });
}

inline Criterion criterion3() {
  return detail::timed("3", "equalizing ODE fixed point", "0.665", 30.0, [](std::string& d) {
    const auto sol = solve_equalizing_ode(ode_default_initial(0), 11);
    const auto prof = guarantee_profile(sol.alpha());
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (double c : prof.curve) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    d = "guarantee=" + detail::fmt(prof.value) + " equalizer in [" + detail::fmt(lo, 5) + ", " + detail::fmt(hi, 5) +
        "] u'(0)=" + detail::fmt(sol.slope0, 5);
    return prof.value >= 0.665 && lo >= 0.6653 && hi <= 0.6720;
  });
}

inline Criterion criterion4() {
  return detail::timed("4", "piecewise maximin m=30", "0.66975", 60.0, [](std::string& d) {
    const auto& r = piecewise30();
    const double rescored = f_j_piecewise_all(r.levels).min_value;
    d = "min_j f_j=" + detail::fmt(r.min_value, 8) + " rescored=" + detail::fmt(rescored, 8) + " >= 0.6697";
    return rescored >= 0.6697 && rescored == r.min_value;
  });
}

inline Criterion criterion5() {
  return detail::timed("5", "blind upper bound sweep", "0.675", 60.0, [](std::string& d) {
    const auto s = sweep_upper_bound(default_K_grid(), default_t_bar_grid());
    d = "sup=" + detail::fmt(s.sup) + " at K=" + detail::fmt(s.argmax_K, 3) + " t_bar=" + detail::fmt(s.argmax_t_bar, 4) +
        " (" + std::to_string(s.feasible) + "/" + std::to_string(s.points) + " feasible)";
    return s.sup >= 0.669 && s.sup <= 0.6755;
  });
}

inline Criterion criterion6() {
  return detail::timed("6", "general upper bound sqrt(3)-1", "0.732", 1.0, [](std::string& d) {
    const double a = std::numbers::sqrt3 - 1.0;
    const std::size_t n = 10000;
    const auto dp = dp_value_hard_general(n, a);
    const double ratio = dp.value / hard_general_prophet(n, a);
    const double limit = hard_general_limit_ratio(a);
    d = "dp ratio=" + detail::fmt(ratio, 6) + " (cutoff " + std::to_string(dp.cutoff) + ") limit=" +
        detail::fmt(limit, 14);
    return ratio <= 0.7330 && std::abs(limit - a) <= 1e-12;
  });
}

inline Criterion criterion7(std::size_t trials = 1000000) {
  return detail::timed("7", "single-threshold trap n=200", "2(1-1/e)", 60.0, [trials](std::string& d) {
    const std::size_t n = 200;
    const auto trap = make_named(HardTag::single_threshold_trap, {n, 0, 0});
    double best = 0.0, best_tau = 0.0;
    for (double tau : {-0.5, 0.5, 1.0, 100.0}) {
      const auto r = simulate_schedule(trap.instance, single_threshold_schedule(trap.instance, tau, 0.0), trials, 7);
      if (r.ratio > best) {
        best = r.ratio;
        best_tau = tau;
      }
    }
    const auto st = simulate_schedule(
        trap.instance, single_threshold_schedule(trap.instance, 1.0, 1.0 / static_cast<double>(n)), trials, 11);
    const double target = (1.0 - std::exp(-1.0)) - 0.02;
    d = "best fixed ratio=" + detail::fmt(best, 4) + " (tau=" + detail::fmt(best_tau, 1) + ") stochastic ratio=" +
        detail::fmt(st.ratio, 4) + " +- " + detail::fmt(st.ratio_ci_radius, 4);
    return best <= 0.52 && st.ratio >= target;
  });
}

inline Criterion criterion8a() {
  return detail::timed("8a", "stopping-time sandwich, 20 instances x 3 strategies", "", 60.0, [](std::string& d) {
    const std::vector<AlphaStrategy> strategies{AlphaStrategy::constant(std::exp(-1.0)),
                                                AlphaStrategy::affine(0.53, -0.38),
                                                AlphaStrategy::piecewise({0.8, 0.55, 0.3, 0.1})};
    Rng rng(derive_seed(8, 0xa));
    const std::size_t trials = 20000;
    std::size_t checks = 0, bad = 0;
    for (int i = 0; i < 20; ++i) {
      const auto inst = random_instance(rng, 2 + rng.below(6), false);
      const std::size_t n = inst.size();
      for (std::size_t s = 0; s < strategies.size(); ++s) {
        const auto levels = strategies[s].levels_at(n);
        const auto emp = empirical_stop_cdf(inst, strategies[s], trials, derive_seed(81, i, s));
        for (std::size_t k = 1; k <= n; ++k) {
          const auto b = stop_cdf_bounds(levels, k, n);
          const auto sd = [&](double p) { return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)); };
          ++checks;
          if (emp.cdf[k - 1] < b.lower - sd(b.lower) - 1e-12 || emp.cdf[k - 1] > b.upper + sd(b.upper) + 1e-12) ++bad;
        }
      }
    }
    d = std::to_string(checks - bad) + "/" + std::to_string(checks) + " (k, instance, strategy) checks inside";
    return bad == 0;
  });
}

inline Criterion criterion8b() {
  return detail::timed("8b", "Monte Carlo vs exact evaluation, n <= 5", "", 60.0, [](std::string& d) {
    Rng rng(derive_seed(8, 0xb));
    std::size_t bad = 0;
    const int cases = 20;
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
      const auto inst = random_instance(rng, 1 + rng.below(5), true);
      const double a = 0.3 + 0.6 * rng.uniform();
      const auto alpha = AlphaStrategy::affine(a, -a * rng.uniform());
      const double exact = exact_eval(inst, alpha);
      const auto mc = monte_carlo(inst, alpha, Mode::deterministic, 40000, derive_seed(82, i));
      const double z = mc.std_error > 0.0 ? std::abs(mc.mean_reward - exact) / mc.std_error
                                          : (std::abs(mc.mean_reward - exact) < 1e-12 ? 0.0 : HUGE_VAL);
      worst = std::max(worst, z);
      if (z > 3.0) ++bad;
    }
    d = std::to_string(cases - bad) + "/" + std::to_string(cases) + " within 3 sigma (worst z=" + detail::fmt(worst, 2) + ")";
    return bad == 0;
  });
}

inline Criterion criterion8c() {
  return detail::timed("8c", "soundness chain on the zoo", "", 60.0, [](std::string& d) {
    struct Named {
      const char* name;
      AlphaStrategy alpha;
      double bound;
    };
    const auto& pw = piecewise30();
    const std::vector<Named> strategies{
        {"constant 1/e", AlphaStrategy::constant(std::exp(-1.0)), 1.0 - std::exp(-1.0)},
        {"affine", AlphaStrategy::affine(0.53, -0.38), guarantee_limit(AlphaStrategy::affine(0.53, -0.38))},
        {"piecewise m=30", AlphaStrategy::piecewise(pw.levels), pw.min_value}};
    std::size_t checks = 0, bad = 0;
    std::string worst;
    for (const auto& z : small_zoo()) {
      const double opt = dp_optimal_small(z.instance);
      for (std::size_t s = 0; s < strategies.size(); ++s) {
        const auto mc = monte_carlo(z.instance, strategies[s].alpha, Mode::blind, 40000, derive_seed(83, checks));
        const double slack = 3.0 * mc.std_error;
        const bool ok = strategies[s].bound * mc.prophet <= mc.mean_reward + slack + 1e-12 &&
                        mc.mean_reward - slack <= opt + 1e-12;
        ++checks;
        if (!ok) {
          ++bad;
          worst = z.name + std::string("/") + strategies[s].name;
        }
      }
    }
    d = std::to_string(checks - bad) + "/" + std::to_string(checks) + " (instance, strategy) pairs ordered" +
        (bad ? " first failure " + worst : "");
    return bad == 0;
  });
}

inline Criterion criterion8d() {
  return detail::timed("8d", "emitted strategies nonincreasing on a 1e4 grid", "", 60.0, [](std::string& d) {
    std::vector<std::pair<std::string, AlphaStrategy>> emitted;
    emitted.emplace_back("piecewise m=30", AlphaStrategy::piecewise(piecewise30().levels));
    const auto seed = ode_default_initial(0);
    emitted.emplace_back("ode seed", seed.alpha());
    emitted.emplace_back("ode fixed point", solve_equalizing_ode(seed, 11).alpha());
    for (double K : {0.5, 1.15, 2.5})
      for (double t : {0.0, 1.0 / 12.0, 0.3}) {
        const auto pt = solve_control_family(K, t);
        if (pt.feasible) emitted.emplace_back("control K=" + detail::fmt(K, 2) + " t=" + detail::fmt(t, 3), pt.alpha());
      }
    std::size_t bad = 0;
    for (const auto& [name, a] : emitted) {
      bool in_range = true;
      for (std::size_t i = 0; i <= 10000; ++i) {
        const double v = a.value(static_cast<double>(i) / 10000.0);
        in_range = in_range && v >= 0.0 && v <= 1.0;
      }
      if (a.monotonicity_violation(10001) > 0.0 || !in_range) ++bad;
    }
    d = std::to_string(emitted.size() - bad) + "/" + std::to_string(emitted.size()) + " strategies monotone in [0,1]";
    return bad == 0;
  });
}

inline Criterion criterion8e() {
  return detail::timed("8e", "bit-identical reports across thread counts", "", 60.0, [](std::string& d) {
    Rng rng(derive_seed(8, 0xe));
    const auto inst = random_instance(rng, 6, false);
    const auto alpha = AlphaStrategy::affine(0.53, -0.38);
    bool ok = true;
    for (Mode mode : {Mode::blind, Mode::deterministic}) {
      const auto ref = monte_carlo(inst, alpha, mode, 50000, 99, 1);
      for (unsigned th : {2u, 3u, 8u}) ok = ok && detail::same_report(ref, monte_carlo(inst, alpha, mode, 50000, 99, th));
    }
    const auto k = linspace(0.5, 2.0, 4);
    const auto t = linspace(0.0, 0.2, 3);
    const auto s1 = sweep_upper_bound(k, t, 1, 512), s3 = sweep_upper_bound(k, t, 3, 512);
    ok = ok && std::memcmp(&s1.sup, &s3.sup, sizeof(double)) == 0;
    d = ok ? "monte_carlo (both modes, 1/2/3/8 threads) and sweep (1/3 threads) identical" : "reports differ";
    return ok;
  });
}

/// Every criterion, in order.
inline std::vector<Criterion> run_all(const std::function<void(const Criterion&)>& on_done = {}) {
  std::vector<std::function<Criterion()>> steps{criterion1,  criterion2,  criterion3,  criterion4,
                                                criterion5,  criterion6,  [] { return criterion7(); },
                                                criterion8a, criterion8b, criterion8c, criterion8d,
                                                criterion8e};
  std::vector<Criterion> out;
  for (const auto& s : steps) {
    out.push_back(s());
    if (on_done) on_done(out.back());
  }
  return out;
}

inline std::string format_line(const Criterion& c) {
  std::ostringstream os;
  os << (c.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.title;
  if (!c.constant.empty()) os << " {" << c.constant << "}";
  os << ": " << c.detail << " (" << detail::fmt(c.seconds, 2) << " s, budget " << detail::fmt(c.limit, 0) << " s)";
  return os.str();
}

}  // namespace prophet::acceptance
