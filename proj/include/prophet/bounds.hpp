#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "prophet/alpha.hpp"
#include "prophet/error.hpp"
#include "prophet/quadrature.hpp"

namespace prophet {

/// Guarantee values f_j per index, with their minimum.
struct BoundReport {
  std::vector<double> per_j;
  double min_value = 0.0;
  std::size_t argmin_j = 0;  ///< 1-based, as in the f_j indexing
};

namespace detail {

inline BoundReport make_report(std::vector<double> per_j) {
  BoundReport r;
  const auto it = std::min_element(per_j.begin(), per_j.end());
  r.min_value = *it;
  r.argmin_j = static_cast<std::size_t>(it - per_j.begin()) + 1;
  r.per_j = std::move(per_j);
  return r;
}

inline double safe_log(double a) {
  return a <= 0.0 ? -std::numeric_limits<double>::infinity() : std::log(std::max(a, 1e-300));
}

}  // namespace detail

/// min{1 - p, (1 - p) / (-ln p)}, with the limits 0 at p = 0 and p = 1.
inline double constant_alpha_factor(double p) {
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return std::min(1.0 - p, (1.0 - p) / -std::log(p));
}

/// f_j for the deterministic blind strategy with levels alpha(1/n)..alpha(n/n),
/// for every j = 1..n+1, in O(n).
inline BoundReport f_j_discrete_all(std::span<const double> levels) {
  const std::size_t n = levels.size();
  require(n >= 1, "need at least one level");
  for (std::size_t k = 0; k < n; ++k) {
    require(levels[k] >= 0.0 && levels[k] <= 1.0, "levels must lie in [0, 1]");
    require(k == 0 || levels[k] <= levels[k - 1], "levels must be nonincreasing");
  }
  const double dn = static_cast<double>(n);
  // tail[k] = (1/n) sum_{i >= k} (prod_{l <= i} alpha_l)^{1/n}
  std::vector<double> tail(n + 1, 0.0);
  {
    std::vector<double> root(n);
    double log_prod = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      log_prod += detail::safe_log(levels[k]);
      root[k] = std::exp(log_prod / dn);
    }
    for (std::size_t k = n; k-- > 0;) tail[k] = tail[k + 1] + root[k] / dn;
  }
  std::vector<double> per_j(n + 1);
  double head = 0.0;  // sum_{k < j} (1 - alpha_k)
  for (std::size_t j = 0; j < n; ++j) {
    if (levels[j] >= 1.0) fail_numerical("division by zero guarantee");
    per_j[j] = head / (dn * (1.0 - levels[j])) + tail[j];
    head += 1.0 - levels[j];
  }
  per_j[n] = head / dn;
  return detail::make_report(std::move(per_j));
}

/// Single f_j, j in 1..n+1.
inline double f_j_discrete(std::span<const double> levels, std::size_t j) {
  require(j >= 1 && j <= levels.size() + 1, "j must lie in [1, n+1]");
  return f_j_discrete_all(levels).per_j[j - 1];
}

/// Sandwich for the stopping-time law P(T <= k):
/// (1/n) sum_{j<=k} (1 - alpha_j) <= P(T <= k) <= 1 - (prod_{j<=k} alpha_j)^{1/n}.
struct StopCdfBounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline StopCdfBounds stop_cdf_bounds(std::span<const double> levels, std::size_t k, std::size_t n) {
  require(n >= 1 && k >= 1 && k <= n && levels.size() >= k, "k must lie in [1, n] with k levels given");
  double sum = 0.0, log_prod = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    sum += 1.0 - levels[j];
    log_prod += detail::safe_log(levels[j]);
  }
  const double dn = static_cast<double>(n);
  return {sum / dn, 1.0 - std::exp(log_prod / dn)};
}

/// g_{m,p}(k): 1 / (1 - (k/m)(1-p)) for k <= m/2, else 2 / (1+p).
inline double g_factor(std::size_t m, double p, std::size_t k) {
  require(m >= 1 && p > 0.0 && p <= 1.0 && k <= m, "g_factor needs m >= 1, p in (0, 1], k in [0, m]");
  if (2 * k <= m) return 1.0 / (1.0 - static_cast<double>(k) / static_cast<double>(m) * (1.0 - p));
  return 2.0 / (1.0 + p);
}

/// f_j of a piecewise-constant strategy with m levels, j = 1..m+1.
inline BoundReport f_j_piecewise_all(std::span<const double> levels) {
  const std::size_t m = levels.size();
  require(m >= 1, "need at least one level");
  for (std::size_t k = 0; k < m; ++k) {
    require(levels[k] <= 1.0 && (k == 0 || levels[k] <= levels[k - 1]), "levels must be nonincreasing in [0, 1]");
    if (!(levels[k] > 0.0)) fail_numerical("piecewise guarantee needs alpha_m > 0 (log of zero)");
  }
  const double dm = static_cast<double>(m);
  // pre_k r_k: weight of block k in the survival sums
  std::vector<double> w(m);
  double log_prod = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double la = std::log(levels[k]);
    const double r = la == 0.0 ? 1.0 / dm : -std::expm1(la / dm) / -la;
    w[k] = std::exp(log_prod / dm) * r;
    log_prod += la;
  }
  std::vector<double> per_j(m + 1);
  double first = 0.0;
  for (double x : w) first += x;
  per_j[0] = first;
  std::vector<double> tail(m + 1, 0.0);  // sum_{k >= j} w_k g(k-1), 0-based k
  for (std::size_t k = m; k-- > 0;) tail[k] = tail[k + 1] + w[k] * g_factor(m, levels[0], k);
  double head = 1.0 - levels[0];
  for (std::size_t j = 1; j < m; ++j) {
    if (levels[j] >= 1.0) fail_numerical("division by zero guarantee");
    per_j[j] = head / (dm * (1.0 - levels[j])) + tail[j];
    head += 1.0 - levels[j];
  }
  per_j[m] = head / dm;
  return detail::make_report(std::move(per_j));
}

inline double f_j_piecewise(std::span<const double> levels, std::size_t j) {
  require(j >= 1 && j <= levels.size() + 1, "j must lie in [1, m+1]");
  return f_j_piecewise_all(levels).per_j[j - 1];
}

/// The continuum functionals of a strategy on a grid.
///
/// A(x) = int_0^x (1 - alpha), E(y) = exp(int_0^y ln alpha), S(x) = int_x^1 E.
/// Nodes are placed on every breakpoint of alpha; a breakpoint appears twice,
/// carrying the left and the right limit of alpha.
struct ContinuumProfile {
  std::vector<double> x;
  std::vector<double> alpha;
  std::vector<double> area;      ///< A(x)
  std::vector<double> survival;  ///< S(x)
};

namespace detail {

// 4-point Gauss-Legendre on [0, 1]; open, so a log singularity at a panel
// end where alpha reaches 0 is never evaluated.
inline constexpr std::array<double, 4> kGlNode{0.0694318442029737, 0.3300094782075719,
                                               0.6699905217924281, 0.9305681557970263};
inline constexpr std::array<double, 4> kGlWeight{0.1739274225687269, 0.3260725774312731,
                                                 0.3260725774312731, 0.1739274225687269};

inline ContinuumProfile build_profile(const AlphaStrategy& alpha, std::size_t panels) {
  std::vector<double> cuts{0.0};
  for (double b : alpha.breakpoints()) cuts.push_back(b);
  cuts.push_back(1.0);

  ContinuumProfile p;
  double area = 0.0;
  double log_e = 0.0;        // int_0^x ln alpha
  bool dead = false;         // alpha vanished on a set of positive measure
  std::vector<double> e;     // E at nodes
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    if (b <= a) continue;
    auto k = static_cast<std::size_t>(std::ceil((b - a) * static_cast<double>(panels)));
    k = std::max<std::size_t>(2, k + (k % 2));
    const double h = (b - a) / static_cast<double>(k);
    std::vector<double> xs(k + 1), vs(k + 1);
    for (std::size_t i = 0; i <= k; ++i) {
      xs[i] = i == k ? b : a + h * static_cast<double>(i);
      vs[i] = i == 0 ? alpha.value(a) : (i == k ? alpha.value_left(b) : alpha.value(xs[i]));
    }
    std::vector<double> one_minus(k + 1);
    for (std::size_t i = 0; i <= k; ++i) one_minus[i] = 1.0 - vs[i];
    const auto cum = quad::cumulative_simpson(one_minus, h);
    if (vs[0] <= 0.0) dead = true;
    for (std::size_t i = 0; i <= k; ++i) {
      if (i > 0 && !dead) {
        double piece = 0.0;
        for (std::size_t g = 0; g < kGlNode.size(); ++g)
          piece += kGlWeight[g] * detail::safe_log(alpha.value(xs[i - 1] + h * kGlNode[g]));
        log_e += h * piece;
        if (!std::isfinite(log_e)) dead = true;
      }
      p.x.push_back(xs[i]);
      p.alpha.push_back(vs[i]);
      p.area.push_back(area + cum[i]);
      e.push_back(dead ? 0.0 : std::exp(log_e));
    }
    area += cum[k];
  }
  // S by Simpson per segment, from the right
  p.survival.assign(p.x.size(), 0.0);
  std::size_t end = p.x.size() - 1;
  double acc = 0.0;
  while (true) {
    std::size_t start = end;
    while (start > 0 && p.x[start - 1] != p.x[start]) --start;
    const std::size_t k = end - start;
    const double h = k > 0 ? (p.x[end] - p.x[start]) / static_cast<double>(k) : 0.0;
    std::vector<double> rev(k + 1);
    for (std::size_t i = 0; i <= k; ++i) rev[i] = e[end - i];
    const auto cum = quad::cumulative_simpson(rev, h);
    for (std::size_t i = 0; i <= k; ++i) p.survival[end - i] = acc + cum[i];
    acc += cum[k];
    if (start == 0) break;
    end = start - 1;
  }
  return p;
}

template <class Eval>
double refine(const Eval& eval, std::size_t grid_size, double tol = 1e-6, std::size_t max_panels = 1u << 19) {
  std::size_t panels = std::max<std::size_t>(grid_size, 8);
  double prev = eval(panels);
  while (panels < max_panels) {
    panels *= 2;
    const double cur = eval(panels);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace detail

/// Continuum guarantee of alpha with its equalizer curve.
struct GuaranteeProfile {
  double value = 0.0;          ///< min{first, inner_inf}
  double first = 0.0;          ///< int_0^1 (1 - alpha)
  double inner_inf = 0.0;      ///< inf_x [A(x) / (1 - alpha(x)) + S(x)]
  double argmin_x = 0.0;
  std::size_t panels = 0;
  std::vector<double> x;       ///< equalizer curve abscissae
  std::vector<double> curve;   ///< A(x) / (1 - alpha(x)) + S(x)
};

namespace detail {

inline GuaranteeProfile guarantee_at(const AlphaStrategy& alpha, std::size_t panels) {
  const auto p = build_profile(alpha, panels);
  GuaranteeProfile g;
  g.panels = panels;
  g.first = p.area.back();
  g.inner_inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    double value;
    if (p.x[i] == 0.0) {
      value = p.survival[i];  // the empty head contributes 0
    } else if (p.alpha[i] >= 1.0) {
      if (p.area[i] <= 0.0) fail_numerical("alpha equals 1 on a set of positive measure");
      continue;  // quotient is +inf
    } else {
      value = p.area[i] / (1.0 - p.alpha[i]) + p.survival[i];
    }
    g.x.push_back(p.x[i]);
    g.curve.push_back(value);
    if (value < g.inner_inf) {
      g.inner_inf = value;
      g.argmin_x = p.x[i];
    }
  }
  g.value = std::min(g.first, g.inner_inf);
  return g;
}

}  // namespace detail

/// Riemann limit of min_j f_j as n -> infinity, refined until stable to 1e-6.
inline GuaranteeProfile guarantee_profile(const AlphaStrategy& alpha, std::size_t grid_size = 1024) {
  GuaranteeProfile best;
  detail::refine(
      [&](std::size_t panels) {
        best = detail::guarantee_at(alpha, panels);
        return best.value;
      },
      grid_size);
  return best;
}

inline double guarantee_limit(const AlphaStrategy& alpha, std::size_t grid_size = 1024) {
  return guarantee_profile(alpha, grid_size).value;
}

/// min{1 - int alpha, int exp(int ln alpha)}: no blind strategy beats this.
inline double blind_upper_objective(const AlphaStrategy& alpha, std::size_t grid_size = 1024) {
  return detail::refine(
      [&](std::size_t panels) {
        const auto p = detail::build_profile(alpha, panels);
        return std::min(p.area.back(), p.survival.front());
      },
      grid_size);
}

}  // namespace prophet
