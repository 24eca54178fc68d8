#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "prophet/error.hpp"

namespace prophet {

/// A blind strategy: a nonincreasing map alpha : [0,1] -> [0,1].
///
/// alpha(x) is the target value of P(max <= tau) for the threshold used at
/// relative time x. Values are right-continuous; value_left() gives the left
/// limit, which differs only at the jumps of piecewise-constant or tabulated
/// strategies.
class AlphaStrategy {
 public:
  enum class Kind { constant, affine_clipped, piecewise_constant, tabulated };

  static AlphaStrategy constant(double p) {
    require(p >= 0.0 && p <= 1.0, "constant alpha must lie in [0, 1]");
    AlphaStrategy a(Kind::constant);
    a.levels_ = {p};
    return a;
  }

  /// alpha(x) = clamp(intercept + slope * x, 0, 1); slope <= 0.
  static AlphaStrategy affine(double intercept, double slope) {
    require(std::isfinite(intercept) && std::isfinite(slope), "affine alpha needs finite coefficients");
    require(slope <= 0.0, "affine alpha must be nonincreasing (slope <= 0)");
    AlphaStrategy a(Kind::affine_clipped);
    a.intercept_ = intercept;
    a.slope_ = slope;
    return a;
  }

  /// alpha = levels[j] on [j/m, (j+1)/m); alpha(1) = levels.back().
  static AlphaStrategy piecewise(std::vector<double> levels) {
    require(!levels.empty(), "piecewise alpha needs at least one level");
    for (std::size_t j = 0; j < levels.size(); ++j) {
      require(levels[j] >= 0.0 && levels[j] <= 1.0, "piecewise levels must lie in [0, 1]");
      if (j > 0) require(levels[j] <= levels[j - 1], "piecewise levels must be nonincreasing");
    }
    AlphaStrategy a(Kind::piecewise_constant);
    a.levels_ = std::move(levels);
    return a;
  }

  /// Linear interpolation through (grid[k], values[k]).
  ///
  /// The grid runs from 0 to 1 and is nondecreasing; a repeated abscissa
  /// encodes a jump (left value first, right value second).
  static AlphaStrategy tabulated(std::vector<double> grid, std::vector<double> values) {
    require(grid.size() >= 2 && grid.size() == values.size(), "tabulated alpha needs >= 2 matching points");
    require(grid.front() == 0.0 && grid.back() == 1.0, "tabulated alpha grid must span [0, 1]");
    for (std::size_t k = 0; k < grid.size(); ++k) {
      require(values[k] >= 0.0 && values[k] <= 1.0, "tabulated alpha values must lie in [0, 1]");
      if (k > 0) {
        require(grid[k] >= grid[k - 1], "tabulated alpha grid must be nondecreasing");
        require(k < 2 || grid[k] > grid[k - 2], "tabulated alpha grid repeats an abscissa more than twice");
      }
    }
    AlphaStrategy a(Kind::tabulated);
    a.grid_ = std::move(grid);
    a.levels_ = std::move(values);
    a.check_monotone();
    return a;
  }

  Kind kind() const noexcept { return kind_; }

  double operator()(double x) const { return value(x); }

  double value(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    switch (kind_) {
      case Kind::constant:
        return levels_[0];
      case Kind::affine_clipped:
        return std::clamp(intercept_ + slope_ * x, 0.0, 1.0);
      case Kind::piecewise_constant: {
        const auto m = levels_.size();
        const auto j = std::min(m - 1, static_cast<std::size_t>(std::floor(x * static_cast<double>(m))));
        return levels_[j];
      }
      case Kind::tabulated:
        return interpolate(x, /*left=*/false);
    }
    return 0.0;
  }

  double value_left(double x) const {
    x = std::clamp(x, 0.0, 1.0);
    switch (kind_) {
      case Kind::piecewise_constant: {
        if (x <= 0.0) return levels_.front();
        const auto m = levels_.size();
        const double scaled = x * static_cast<double>(m);
        auto j = static_cast<std::size_t>(std::ceil(scaled));
        j = std::clamp<std::size_t>(j, 1, m);
        return levels_[j - 1];
      }
      case Kind::tabulated:
        return interpolate(x, /*left=*/true);
      default:
        return value(x);
    }
  }

  /// Interior points of (0, 1) where alpha may jump or kink, sorted.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    switch (kind_) {
      case Kind::constant:
        break;
      case Kind::affine_clipped:
        if (slope_ < 0.0) {
          for (double level : {1.0, 0.0}) {
            const double x = (level - intercept_) / slope_;
            if (x > 0.0 && x < 1.0) out.push_back(x);
          }
        }
        break;
      case Kind::piecewise_constant:
        for (std::size_t j = 1; j < levels_.size(); ++j)
          out.push_back(static_cast<double>(j) / static_cast<double>(levels_.size()));
        break;
      case Kind::tabulated:
        for (double g : grid_)
          if (g > 0.0 && g < 1.0) out.push_back(g);
        break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// alpha(j/n) for j = 1..n (the deterministic blind levels).
  std::vector<double> levels_at(std::size_t n) const {
    std::vector<double> out(n);
    for (std::size_t j = 1; j <= n; ++j) out[j - 1] = value(static_cast<double>(j) / static_cast<double>(n));
    return out;
  }

  /// Largest increase found on a uniform grid of `points` nodes (0 when nonincreasing).
  double monotonicity_violation(std::size_t points = 10001) const {
    double worst = 0.0;
    double prev = value(0.0);
    for (std::size_t k = 1; k < points; ++k) {
      const double cur = value(static_cast<double>(k) / static_cast<double>(points - 1));
      worst = std::max(worst, cur - prev);
      prev = cur;
    }
    return worst;
  }

  // Raw parameters, for serialization.
  double intercept() const noexcept { return intercept_; }
  double slope() const noexcept { return slope_; }
  const std::vector<double>& levels() const noexcept { return levels_; }
  const std::vector<double>& grid() const noexcept { return grid_; }

 private:
  explicit AlphaStrategy(Kind k) : kind_(k) {}

  double interpolate(double x, bool left) const {
    // first node strictly greater than x (right-continuous) or >= x (left limit)
    auto it = left ? std::lower_bound(grid_.begin(), grid_.end(), x)
                   : std::upper_bound(grid_.begin(), grid_.end(), x);
    if (it == grid_.begin()) return levels_.front();
    if (it == grid_.end()) return levels_.back();
    const auto k = static_cast<std::size_t>(it - grid_.begin());
    const double x0 = grid_[k - 1];
    const double x1 = grid_[k];
    if (x1 == x0) return left ? levels_[k - 1] : levels_[k];
    const double w = (x - x0) / (x1 - x0);
    return levels_[k - 1] + w * (levels_[k] - levels_[k - 1]);
  }

  void check_monotone() const {
    for (std::size_t k = 1; k < levels_.size(); ++k)
      require(levels_[k] <= levels_[k - 1] + 1e-12, "tabulated alpha must be nonincreasing");
  }

  Kind kind_;
  double intercept_ = 0.0;
  double slope_ = 0.0;
  std::vector<double> levels_;  // the level(s) of a constant, piecewise or tabulated alpha
  std::vector<double> grid_;
};

}  // namespace prophet
