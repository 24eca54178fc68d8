#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace prophet::opt {

/// max c.x subject to A x <= b, x >= 0, with b >= 0 (so the slack basis is feasible).
///
/// Dense tableau simplex with Bland's rule; meant for the few-dozen-variable
/// programs of the trust-region maximin step. Returns nullopt when unbounded.
inline std::optional<std::vector<double>> simplex_max(const std::vector<std::vector<double>>& A,
                                                      const std::vector<double>& b,
                                                      const std::vector<double>& c,
                                                      std::size_t max_pivots = 100000) {
  const std::size_t m = A.size(), n = c.size();
  const std::size_t cols = n + m + 1;  // structural, slack, rhs
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = A[i][j];
    t[i][n + i] = 1.0;
    t[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  constexpr double eps = 1e-12;
  for (std::size_t it = 0; it < max_pivots; ++it) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j)
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= eps) continue;
      const double ratio = t[i][cols - 1] / t[i][enter];
      if (leave == m || ratio < best - eps || (ratio <= best + eps && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == m) return std::nullopt;
    const double piv = t[leave][enter];
    for (double& v : t[leave]) v /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = t[i][enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) x[basis[i]] = t[i][cols - 1];
  return x;
}

}  // namespace prophet::opt
