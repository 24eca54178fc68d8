#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace prophet::opt {

struct NelderMeadOptions {
  std::size_t max_evals = 20000;
  double ftol = 1e-12;   ///< stop when the simplex value spread falls below this
  double step = 0.1;     ///< initial simplex edge
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evals = 0;
};

/// Minimizes f with dimension-adaptive Nelder-Mead coefficients
/// (reflection 1, expansion 1 + 2/d, contraction 3/4 - 1/(2d), shrink 1 - 1/d).
template <class F>
NelderMeadResult nelder_mead(const F& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
  const std::size_t d = x0.size();
  const double dd = static_cast<double>(d);
  const double c_exp = d > 1 ? 1.0 + 2.0 / dd : 2.0;
  const double c_con = d > 1 ? 0.75 - 0.5 / dd : 0.5;
  const double c_shr = d > 1 ? 1.0 - 1.0 / dd : 0.5;

  std::vector<std::vector<double>> pts(d + 1, x0);
  std::vector<double> val(d + 1);
  std::size_t evals = 0;
  const auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? HUGE_VAL : v;
  };
  for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += opt.step;
  for (std::size_t i = 0; i <= d; ++i) val[i] = eval(pts[i]);

  std::vector<std::size_t> idx(d + 1);
  std::vector<double> centroid(d), trial(d), trial2(d);
  const auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t k = 0; k < d; ++k) out[k] = centroid[k] + t * (worst[k] - centroid[k]);
  };
  while (evals < opt.max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[d - 1];
    if (std::abs(val[worst] - val[best]) <= opt.ftol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i : idx)
      if (i != worst)
        for (std::size_t k = 0; k < d; ++k) centroid[k] += pts[i][k] / dd;

    along(-1.0, trial, pts[worst]);
    const double fr = eval(trial);
    if (fr < val[best]) {
      along(-c_exp, trial2, pts[worst]);
      const double fe = eval(trial2);
      if (fe < fr) {
        pts[worst] = trial2;
        val[worst] = fe;
      } else {
        pts[worst] = trial;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = trial;
      val[worst] = fr;
      continue;
    }
    // contraction: outside if the reflection helped, inside otherwise
    const bool outside = fr < val[worst];
    along(outside ? -c_con : c_con, trial2, pts[worst]);
    const double fc = eval(trial2);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = trial2;
      val[worst] = fc;
      continue;
    }
    for (std::size_t i : idx) {
      if (i == best) continue;
      for (std::size_t k = 0; k < d; ++k) pts[i][k] = pts[best][k] + c_shr * (pts[i][k] - pts[best][k]);
      val[i] = eval(pts[i]);
    }
  }
  const auto b = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  return {pts[b], val[b], evals};
}

}  // namespace prophet::opt
