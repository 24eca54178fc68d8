#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "prophet/error.hpp"

namespace prophet::ode {

template <std::size_t N>
using State = std::array<double, N>;

struct Dopri5Options {
  double rtol = 1e-9;
  double atol = 1e-9;
  double h_min = 1e-14;
  std::size_t max_steps = 1000000;
};

/// Dormand-Prince 5(4) with PI-free step control; integrates y' = f(x, y) from x0 to x1.
/// `h` carries the step size between calls so consecutive segments warm-start.
template <std::size_t N, class F>
State<N> dopri5(const F& f, double x0, State<N> y, double x1, double& h, const Dopri5Options& opt = {}) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = x1 - x0;
  if (span <= 0.0) return y;
  if (!(h > 0.0)) h = span / 16.0;
  double x = x0;
  State<N> k1 = f(x, y), k2, k3, k4, k5, k6, k7, tmp, y5;
  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    if (x >= x1) return y;
    const bool last = x + h >= x1;
    const double hs = last ? x1 - x : h;
    const auto stage = [&](std::initializer_list<std::pair<const State<N>*, double>> terms) {
      for (std::size_t i = 0; i < N; ++i) {
        double s = y[i];
        for (const auto& [k, a] : terms) s += hs * a * (*k)[i];
        tmp[i] = s;
      }
      return tmp;
    };
    k2 = f(x + c2 * hs, stage({{&k1, a21}}));
    k3 = f(x + c3 * hs, stage({{&k1, a31}, {&k2, a32}}));
    k4 = f(x + c4 * hs, stage({{&k1, a41}, {&k2, a42}, {&k3, a43}}));
    k5 = f(x + c5 * hs, stage({{&k1, a51}, {&k2, a52}, {&k3, a53}, {&k4, a54}}));
    k6 = f(x + hs, stage({{&k1, a61}, {&k2, a62}, {&k3, a63}, {&k4, a64}, {&k5, a65}}));
    y5 = stage({{&k1, b1}, {&k3, b3}, {&k4, b4}, {&k5, b5}, {&k6, b6}});
    k7 = f(x + hs, y5);
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) err = 1e10;
    if (err <= 1.0) {
      x = last ? x1 : x + hs;
      y = y5;
      k1 = k7;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (!last || err > 1.0) h = hs * factor;
    if (h < opt.h_min) fail_numerical("adaptive integrator step size underflow");
  }
  fail_numerical("adaptive integrator exceeded its step budget");
}

}  // namespace prophet::ode
