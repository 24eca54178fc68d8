#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "prophet/alpha.hpp"
#include "prophet/bounds.hpp"
#include "prophet/error.hpp"
#include "prophet/lp.hpp"
#include "prophet/nelder_mead.hpp"
#include "prophet/ode.hpp"
#include "prophet/rng.hpp"

namespace prophet {

/// One line of an optimizer trace.
struct IterationLog {
  std::string phase;
  std::size_t iteration = 0;
  double value = 0.0;
  double aux = 0.0;  ///< phase specific: evaluations, trust radius, shooting slope
};

// ---------------------------------------------------------------------------
// Maximin over nonincreasing level vectors
// ---------------------------------------------------------------------------

/// Scores a level vector: returns every f_j (the objective is their minimum).
using LevelScore = std::function<std::vector<double>(std::span<const double>)>;

struct MaximinOptions {
  std::size_t restarts = 4;
  std::size_t nm_evals = 30000;
  std::size_t slp_iterations = 400;
};

struct MaximinResult {
  std::vector<double> levels;
  double min_value = -std::numeric_limits<double>::infinity();
  std::vector<IterationLog> log;
};

namespace detail {

/// alpha_k = exp(-(w_1 + ... + w_k)), w >= 0: monotone by construction.
inline std::vector<double> levels_from_weights(std::span<const double> w) {
  std::vector<double> out(w.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k];
    out[k] = std::exp(-acc);
  }
  return out;
}

inline std::vector<double> weights_from_levels(std::span<const double> levels) {
  std::vector<double> w(levels.size());
  double prev = 0.0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double cur = -std::log(std::clamp(levels[k], 1e-12, 1.0));
    w[k] = std::max(cur - prev, 0.0);
    prev = std::max(cur, prev);
  }
  return w;
}

inline double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }
inline double softplus_inv(double w) { return w > 30.0 ? w : std::log(std::expm1(std::max(w, 1e-12))); }

// Lower bound keeping alpha_1 < 1, where the guarantee would divide by zero.
inline constexpr double kFirstWeightFloor = 1e-9;

inline std::vector<double> score_weights(const LevelScore& score, std::span<const double> w) {
  try {
    return score(levels_from_weights(w));
  } catch (const Error&) {
    return {};
  }
}

inline double min_of(const std::vector<double>& v) {
  return v.empty() ? -std::numeric_limits<double>::infinity() : *std::min_element(v.begin(), v.end());
}

/// Trust-region sequential linear programming for max_w min_j f_j(w), w >= floor.
inline std::vector<double> slp_polish(const LevelScore& score, std::vector<double> w, std::size_t iterations,
                                      std::vector<IterationLog>& log) {
  const std::size_t d = w.size();
  std::vector<double> lb(d, 0.0);
  lb[0] = kFirstWeightFloor;
  for (std::size_t i = 0; i < d; ++i) w[i] = std::max(w[i], lb[i]);
  auto f = score_weights(score, w);
  if (f.empty()) return w;
  double radius = 0.05;
  for (std::size_t it = 0; it < iterations && radius > 1e-13; ++it) {
    const std::size_t J = f.size();
    // central differences, one-sided at the floor
    std::vector<std::vector<double>> grad(J, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
      const double h = 1e-7 * std::max(1.0, w[i]);
      auto wp = w, wm = w;
      wp[i] += h;
      double span = h;
      if (w[i] - h >= lb[i]) {
        wm[i] -= h;
        span = 2.0 * h;
      }
      const auto fp = score_weights(score, wp);
      const auto fm = span > h ? score_weights(score, wm) : f;
      if (fp.size() != J || fm.size() != J) return w;
      for (std::size_t j = 0; j < J; ++j) grad[j][i] = (fp[j] - fm[j]) / span;
    }
    // variables: t' then d''; d = l + d'' with l = max(-r, lb - w)
    std::vector<double> l(d), width(d);
    for (std::size_t i = 0; i < d; ++i) {
      l[i] = std::max(-radius, lb[i] - w[i]);
      width[i] = radius - l[i];
    }
    std::vector<double> base(J);
    double lowest = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      double gl = 0.0;
      for (std::size_t i = 0; i < d; ++i) gl += grad[j][i] * l[i];
      base[j] = f[j] + gl;
      lowest = std::min(lowest, base[j]);
    }
    const double shift = 1.0 - lowest;
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (std::size_t j = 0; j < J; ++j) {
      std::vector<double> row(d + 1);
      row[0] = 1.0;
      for (std::size_t i = 0; i < d; ++i) row[i + 1] = -grad[j][i];
      A.push_back(std::move(row));
      b.push_back(base[j] + shift);
    }
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<double> row(d + 1, 0.0);
      row[i + 1] = 1.0;
      A.push_back(std::move(row));
      b.push_back(width[i]);
    }
    std::vector<double> c(d + 1, 0.0);
    c[0] = 1.0;
    const auto sol = opt::simplex_max(A, b, c);
    if (!sol) break;
    const double current = min_of(f);
    const double predicted = ((*sol)[0] - shift) - current;
    if (predicted < 1e-14) break;
    auto trial = w;
    for (std::size_t i = 0; i < d; ++i) trial[i] = std::max(lb[i], w[i] + l[i] + (*sol)[i + 1]);
    const auto ft = score_weights(score, trial);
    const double actual = min_of(ft) - current;
    const double rho = actual / predicted;
    if (rho > 0.1) {
      w = std::move(trial);
      f = ft;
      if (rho > 0.75) radius = std::min(radius * 2.0, 1.0);
    } else {
      radius *= 0.5;
    }
    log.push_back({"slp", it, min_of(f), radius});
  }
  return w;
}

}  // namespace detail

/// Multi-start Nelder-Mead followed by a trust-region LP polish.
inline MaximinResult maximize_min_levels(std::size_t count, const LevelScore& score, std::uint64_t seed,
                                         const MaximinOptions& opt = {}) {
  require(count >= 1, "need at least one level");
  MaximinResult best;
  const std::size_t restarts = std::max<std::size_t>(opt.restarts, 1);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, 0x0971, r));
    // start: a decreasing ramp from ~0.6 to ~0.05, jittered after the first restart
    std::vector<double> levels(count);
    const double top = 0.6 + (r == 0 ? 0.0 : 0.2 * (rng.uniform() - 0.5));
    const double bottom = 0.05 + (r == 0 ? 0.0 : 0.04 * (rng.uniform() - 0.5));
    for (std::size_t k = 0; k < count; ++k) {
      const double s = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
      levels[k] = top + (bottom - top) * s;
    }
    if (count == 1) levels[0] = 0.3 + 0.1 * rng.uniform();
    auto w = detail::weights_from_levels(levels);
    std::vector<double> z(count);
    for (std::size_t k = 0; k < count; ++k) z[k] = detail::softplus_inv(std::max(w[k], 1e-6));

    const auto objective = [&](const std::vector<double>& zz) {
      std::vector<double> ww(zz.size());
      for (std::size_t k = 0; k < zz.size(); ++k) ww[k] = detail::softplus(zz[k]);
      ww[0] = std::max(ww[0], detail::kFirstWeightFloor);
      return -detail::min_of(detail::score_weights(score, ww));
    };
    opt::NelderMeadOptions nm;
    nm.max_evals = opt.nm_evals;
    nm.step = 0.25;
    auto res = opt::nelder_mead(objective, z, nm);
    // one restart of the simplex around the incumbent helps in high dimension
    nm.step = 0.05;
    res = opt::nelder_mead(objective, res.x, nm);
    best.log.push_back({"nelder_mead", r, -res.value, static_cast<double>(res.evals)});

    for (std::size_t k = 0; k < count; ++k) w[k] = detail::softplus(res.x[k]);
    w = detail::slp_polish(score, w, opt.slp_iterations, best.log);
    auto lv = detail::levels_from_weights(w);
    const double value = detail::min_of(score(lv));
    best.log.push_back({"restart_best", r, value, 0.0});
    if (value > best.min_value) {
      best.min_value = value;
      best.levels = std::move(lv);
    }
  }
  return best;
}

/// Best piecewise-constant strategy with m levels for the piecewise guarantee.
inline MaximinResult optimize_piecewise(std::size_t m, std::size_t restarts = 4, std::uint64_t seed = 0) {
  MaximinOptions opt;
  opt.restarts = restarts;
  return maximize_min_levels(
      m, [](std::span<const double> lv) { return f_j_piecewise_all(lv).per_j; }, seed, opt);
}

/// Best deterministic blind levels alpha(j/n) for the finite-n guarantee.
inline MaximinResult optimize_discrete(std::size_t n, std::size_t restarts = 2, std::uint64_t seed = 0) {
  MaximinOptions opt;
  opt.restarts = restarts;
  return maximize_min_levels(
      n, [](std::span<const double> lv) { return f_j_discrete_all(lv).per_j; }, seed, opt);
}

// ---------------------------------------------------------------------------
// Equalizing ODE
// ---------------------------------------------------------------------------

/// u(x) = int_0^x (1 - alpha) on a grid, with alpha = 1 - u'.
struct OdeSolution {
  std::vector<double> grid;
  std::vector<double> u_values;
  std::vector<double> alpha_values;
  double residual = 0.0;  ///< max |u'^2 K - u'' u| on interior nodes, K from alpha itself
  double slope0 = 0.0;    ///< u'(0)
  std::vector<IterationLog> log;

  AlphaStrategy alpha() const { return AlphaStrategy::tabulated(grid, alpha_values); }
};

namespace detail {

/// x -> int_0^x ln alpha for a tabulated alpha, exact per panel up to 4-point Gauss.
class LogIntegral {
 public:
  LogIntegral(std::vector<double> grid, std::vector<double> alpha) : x_(std::move(grid)), a_(std::move(alpha)) {
    cum_.assign(x_.size(), 0.0);
    for (std::size_t i = 1; i < x_.size(); ++i) cum_[i] = cum_[i - 1] + piece(i - 1, x_[i]);
  }

  double operator()(double x) const {
    if (x <= x_.front()) return 0.0;
    if (x >= x_.back()) return cum_.back();
    const auto i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
    return cum_[i] + piece(i, x);
  }

  double alpha_at(double x) const {
    const auto i = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()), x_.size() - 1);
    if (i == 0) return a_.front();
    const double w = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return a_[i - 1] + w * (a_[i] - a_[i - 1]);
  }

 private:
  // int_{x_i}^{x} ln alpha
  double piece(std::size_t i, double x) const {
    const double h = x - x_[i];
    if (h <= 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t g = 0; g < kGlNode.size(); ++g) s += kGlWeight[g] * safe_log(alpha_at(x_[i] + h * kGlNode[g]));
    return h * s;
  }

  std::vector<double> x_, a_, cum_;
};

inline std::vector<double> uniform_grid(std::size_t nodes) {
  std::vector<double> g(nodes);
  for (std::size_t i = 0; i < nodes; ++i) g[i] = static_cast<double>(i) / static_cast<double>(nodes - 1);
  return g;
}

inline std::vector<double> resample(const AlphaStrategy& a, const std::vector<double>& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = a.value(grid[i]);
  return v;
}

inline double ode_residual(const std::vector<double>& x, const std::vector<double>& u, const std::vector<double>& a) {
  const LogIntegral L(x, a);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
    const double p = 1.0 - a[i];
    const double pp = ((1.0 - a[i + 1]) - (1.0 - a[i - 1])) / (h0 + h1);
    const double K = -std::expm1(L(x[i]));
    worst = std::max(worst, std::abs(p * p * K - pp * u[i]));
  }
  return worst;
}

}  // namespace detail

/// Wraps a strategy as an initial iterate on a uniform grid (alpha(1) forced to 0).
inline OdeSolution ode_initial_from_alpha(const AlphaStrategy& alpha, std::size_t nodes = 2049) {
  require(nodes >= 3, "need at least three grid nodes");
  OdeSolution s;
  s.grid = detail::uniform_grid(nodes);
  s.alpha_values = detail::resample(alpha, s.grid);
  s.alpha_values.back() = 0.0;
  std::vector<double> one_minus(nodes);
  for (std::size_t i = 0; i < nodes; ++i) one_minus[i] = 1.0 - s.alpha_values[i];
  s.u_values = quad::cumulative_simpson(one_minus, s.grid[1]);
  s.slope0 = one_minus.front();
  return s;
}

/// Initial iterate from the maximin deterministic levels at n = 23.
inline OdeSolution ode_default_initial(std::uint64_t seed = 0, std::size_t nodes = 2049) {
  constexpr std::size_t n = 23;
  const auto best = optimize_discrete(n, 2, seed);
  std::vector<double> g{0.0}, v{best.levels.front()};
  for (std::size_t j = 1; j < n; ++j) {
    g.push_back(static_cast<double>(j) / static_cast<double>(n));
    v.push_back(best.levels[j - 1]);
  }
  g.push_back(1.0);
  v.push_back(0.0);
  auto init = ode_initial_from_alpha(AlphaStrategy::tabulated(g, v), nodes);
  init.log.push_back({"seed_n23", 0, best.min_value, 0.0});
  return init;
}

/// Picard iteration for u'^2 K - u'' u = 0, u(0) = 0, u'(1) = 1, with K frozen
/// at the previous iterate. Each step shoots on u'(0) with adaptive
/// Dormand-Prince (tolerance 1e-9). The equation is homogeneous of degree one
/// in (u, u'), so u'(1) is linear in u'(0) and a secant shot is exact; the
/// hit is verified anyway.
inline OdeSolution solve_equalizing_ode(const OdeSolution& init, std::size_t iterations = 11) {
  require(init.grid.size() >= 3 && init.grid.size() == init.alpha_values.size(), "malformed initial iterate");
  require(init.alpha_values.back() <= 1e-12, "initial iterate needs alpha(1) = 0");
  OdeSolution cur = init;
  const auto& x = cur.grid;
  const std::size_t nodes = x.size();
  constexpr double x_start = 1e-5;

  for (std::size_t it = 1; it <= iterations; ++it) {
    const detail::LogIntegral L(x, cur.alpha_values);
    const double k0 = -detail::safe_log(cur.alpha_values.front());
    if (!std::isfinite(k0)) fail_numerical("equalizing ODE: alpha(0) = 0 leaves no room to shoot");
    const auto rhs = [&](double xx, const ode::State<2>& y) -> ode::State<2> {
      const double K = -std::expm1(L(xx));
      return {y[1], y[1] * y[1] * K / y[0]};
    };
    const auto shoot = [&](double c, std::vector<double>* u, std::vector<double>* p) {
      ode::State<2> y{c * x_start + 0.5 * c * k0 * x_start * x_start, c + c * k0 * x_start};
      if (u) {
        (*u)[0] = 0.0;
        (*p)[0] = c;
      }
      double h = 0.0, at = x_start;
      for (std::size_t i = 1; i < nodes; ++i) {
        y = ode::dopri5<2>(rhs, at, y, x[i], h);
        at = x[i];
        if (u) {
          (*u)[i] = y[0];
          (*p)[i] = y[1];
        }
      }
      return y[1];
    };
    const double phi = shoot(1.0, nullptr, nullptr);
    if (!(std::isfinite(phi) && phi > 0.0)) fail_numerical("equalizing ODE: shooting bracket failure (u'(1) = " +
                                                            std::to_string(phi) + " at u'(0) = 1)");
    double c = 1.0 / phi;
    std::vector<double> u(nodes), p(nodes);
    for (int pass = 0; pass < 3; ++pass) {
      const double hit = shoot(c, &u, &p);
      if (std::abs(hit - 1.0) < 1e-10) break;
      c /= hit;
    }
    if (std::abs(p.back() - 1.0) > 1e-8)
      fail_numerical("equalizing ODE: shooting missed u'(1) = 1 (got " + std::to_string(p.back()) + ")");
    cur.u_values = u;
    cur.slope0 = c;
    for (std::size_t i = 0; i < nodes; ++i) cur.alpha_values[i] = std::clamp(1.0 - p[i], 0.0, 1.0);
    cur.alpha_values.back() = 0.0;
    // enforce exact monotonicity against round-off
    for (std::size_t i = 1; i < nodes; ++i) cur.alpha_values[i] = std::min(cur.alpha_values[i], cur.alpha_values[i - 1]);
    cur.residual = detail::ode_residual(x, cur.u_values, cur.alpha_values);
    cur.log.push_back({"picard", it, cur.residual, c});
  }
  return cur;
}

// ---------------------------------------------------------------------------
// The alpha_{K, t_bar} family: alpha = 1 on [0, t_bar), then beta with
// beta' = -K exp(int_{t_bar}^t ln beta), beta(1) = 0.
// ---------------------------------------------------------------------------

struct ControlFamilyPoint {
  double K = 0.0;
  double t_bar = 0.0;
  bool feasible = false;
  double beta0 = 0.0;               ///< beta(t_bar)
  std::vector<double> t;            ///< nodes on [t_bar, 1]
  std::vector<double> beta_curve;   ///< beta at t
  std::vector<double> g_curve;      ///< int_{t_bar}^t ln beta
  double objective = -std::numeric_limits<double>::infinity();  ///< blind_upper_objective of alpha
  double objective_direct = -std::numeric_limits<double>::infinity();  ///< same, from the integrator

  AlphaStrategy alpha() const {
    require(feasible, "infeasible control point has no strategy");
    std::vector<double> g, v;
    if (t_bar > 0.0) {
      g = {0.0, t_bar};
      v = {1.0, 1.0};
    }
    g.insert(g.end(), t.begin(), t.end());
    v.insert(v.end(), beta_curve.begin(), beta_curve.end());
    return AlphaStrategy::tabulated(std::move(g), std::move(v));
  }
};

namespace detail {

struct ControlRun {
  double hit = 0.0;  ///< time beta reaches 0, or 1 + tangent extrapolation when it does not
  double int_beta = 0.0;
  double int_eg = 0.0;
};

/// Integrates (g, beta) with classical RK4 on `steps` uniform steps; near the
/// zero of beta the step is halved until the tangent hit is resolved.
/// beta is convex while decreasing, so the tangent never overshoots the hit.
inline ControlRun control_integrate(double K, double t_bar, double beta0, std::size_t steps,
                                    std::vector<double>* t_out = nullptr, std::vector<double>* b_out = nullptr,
                                    std::vector<double>* g_out = nullptr) {
  const double H = (1.0 - t_bar) / static_cast<double>(steps);
  double t = t_bar, g = 0.0, b = beta0, ib = 0.0, ie = 0.0;
  const auto push = [&] {
    if (t_out) {
      t_out->push_back(t);
      b_out->push_back(b);
      g_out->push_back(g);
    }
  };
  push();
  struct D {
    double dg, db, dib, die;
  };
  const auto f = [&](double gg, double bb) {
    const double eg = std::exp(gg);
    return D{std::log(bb), -K * eg, bb, eg};
  };
  for (std::size_t s = 0; s < steps; ++s) {
    const double t_next = t_bar + H * static_cast<double>(s + 1);
    while (t < t_next) {
      double h = t_next - t;
      const double slope = K * std::exp(g);
      // refine while the tangent would reach zero within two steps
      while (b - 2.0 * h * slope <= 0.0 && h > 1e-12) h *= 0.5;
      if (b - 2.0 * h * slope <= 0.0) {
        const double dt = b / slope;  // tangent hit
        ib += 0.5 * b * dt;
        ie += std::exp(g) * dt;
        g += dt * (std::log(b) - 1.0);
        t += dt;
        b = 0.0;
        if (t_out) {
          // fill the remaining nodes with the terminal state
          for (std::size_t r = s; r < steps; ++r) {
            const double tr = t_bar + H * static_cast<double>(r + 1);
            t_out->push_back(tr);
            b_out->push_back(0.0);
            g_out->push_back(g);
          }
        }
        return {t, ib, ie};
      }
      const D k1 = f(g, b);
      const D k2 = f(g + 0.5 * h * k1.dg, b + 0.5 * h * k1.db);
      const D k3 = f(g + 0.5 * h * k2.dg, b + 0.5 * h * k2.db);
      const D k4 = f(g + h * k3.dg, b + h * k3.db);
      g += h / 6.0 * (k1.dg + 2.0 * k2.dg + 2.0 * k3.dg + k4.dg);
      b += h / 6.0 * (k1.db + 2.0 * k2.db + 2.0 * k3.db + k4.db);
      ib += h / 6.0 * (k1.dib + 2.0 * k2.dib + 2.0 * k3.dib + k4.dib);
      ie += h / 6.0 * (k1.die + 2.0 * k2.die + 2.0 * k3.die + k4.die);
      t = (h == t_next - t) ? t_next : t + h;
    }
    push();
  }
  return {1.0 + b / (K * std::exp(g)), ib, ie};
}

}  // namespace detail

/// Solves the family ODE for (K, t_bar) by shooting on ln beta(t_bar) so that
/// beta vanishes exactly at t = 1, then scores alpha_{K, t_bar}.
inline ControlFamilyPoint solve_control_family(double K, double t_bar, std::size_t steps = 2048) {
  require(K >= 0.0 && K <= 3.0, "K must lie in [0, 3]");
  require(t_bar >= 0.0 && t_bar <= 1.0 / 3.0 + 1e-15, "t_bar must lie in [0, 1/3]");
  ControlFamilyPoint pt;
  pt.K = K;
  pt.t_bar = t_bar;
  if (K == 0.0) return pt;  // beta stays constant and never reaches 0
  // F(s) = hit time - 1 with beta0 = e^s: increasing in s
  const auto F = [&](double s) { return detail::control_integrate(K, t_bar, std::exp(s), steps).hit - 1.0; };
  double lo = -40.0, hi = 0.0;
  double flo = F(lo), fhi = F(hi);
  if (fhi < 0.0 || flo > 0.0) return pt;  // no blow-down at t = 1 in range
  int side = 0;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    double mid = lo - flo * (hi - lo) / (fhi - flo);
    if (!(mid > lo && mid < hi) || side >= 2 || side <= -2) {
      mid = 0.5 * (lo + hi);
      side = 0;
    }
    const double fm = F(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if (fm > 0.0) {
      hi = mid;
      fhi = fm;
      if (side > 0) flo *= 0.5;
      side = side > 0 ? side + 1 : 1;
    } else {
      lo = mid;
      flo = fm;
      if (side < 0) fhi *= 0.5;
      side = side < 0 ? side - 1 : -1;
    }
    if (std::abs(fm) < 1e-13) {
      lo = hi = mid;
      break;
    }
  }
  const double s = 0.5 * (lo + hi);
  pt.beta0 = std::exp(s);
  const auto run = detail::control_integrate(K, t_bar, pt.beta0, steps, &pt.t, &pt.beta_curve, &pt.g_curve);
  if (std::abs(run.hit - 1.0) > 1e-6) return pt;
  pt.t.back() = 1.0;
  pt.beta_curve.back() = 0.0;
  pt.feasible = true;
  pt.objective_direct = std::min(1.0 - t_bar - run.int_beta, t_bar + run.int_eg);
  pt.objective = blind_upper_objective(pt.alpha());
  return pt;
}

struct SweepResult {
  double sup = -std::numeric_limits<double>::infinity();
  double argmax_K = 0.0;
  double argmax_t_bar = 0.0;
  std::size_t feasible = 0;
  std::size_t points = 0;
  std::vector<ControlFamilyPoint> grid;  ///< K-major order; curves dropped to save memory
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

inline std::vector<double> default_K_grid(std::size_t n = 61) { return linspace(0.0, 3.0, n); }
inline std::vector<double> default_t_bar_grid(std::size_t n = 21) { return linspace(0.0, 1.0 / 3.0, n); }

/// Max objective over a (K, t_bar) grid; ties go to the lexicographically smallest (K, t_bar).
inline SweepResult sweep_upper_bound(const std::vector<double>& grid_K, const std::vector<double>& grid_t,
                                     unsigned threads = 1, std::size_t steps = 2048) {
  require(!grid_K.empty() && !grid_t.empty(), "sweep needs nonempty grids");
  SweepResult out;
  out.points = grid_K.size() * grid_t.size();
  out.grid.resize(out.points);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(std::max(1u, threads));
  const auto body = [&](unsigned w) {
    try {
      for (std::size_t i = next.fetch_add(1); i < out.points; i = next.fetch_add(1)) {
        auto pt = solve_control_family(grid_K[i / grid_t.size()], grid_t[i % grid_t.size()], steps);
        pt.t.clear();
        pt.beta_curve.clear();
        pt.g_curve.clear();
        out.grid[i] = std::move(pt);
      }
    } catch (...) {
      errors[w] = std::current_exception();
      next.store(out.points);
    }
  };
  if (threads <= 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(body, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& pt : out.grid) {
    if (!pt.feasible) continue;
    ++out.feasible;
    if (pt.objective > out.sup) {
      out.sup = pt.objective;
      out.argmax_K = pt.K;
      out.argmax_t_bar = pt.t_bar;
    }
  }
  return out;
}

}  // namespace prophet
