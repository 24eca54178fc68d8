#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "prophet/error.hpp"
#include "prophet/quadrature.hpp"
#include "prophet/rng.hpp"

namespace prophet {

/// Threshold that accepts every (nonnegative) value.
inline constexpr double kAcceptAll = -std::numeric_limits<double>::infinity();

/// Law of a single nonnegative random variable.
///
/// One of: a point mass, a uniform law on [lo, hi], a finitely supported law,
/// or a finite mixture of the above. Immutable once constructed.
class Distribution {
 public:
  enum class Kind { point_mass, uniform, finite, mixture };

  static Distribution point_mass(double value) {
    require(std::isfinite(value) && value >= 0.0, "point mass value must be finite and nonnegative");
    Distribution d(Kind::point_mass);
    d.values_ = {value};
    d.probs_ = {1.0};
    d.cum_ = {0.0, 1.0};
    return d;
  }

  static Distribution uniform(double lo, double hi) {
    require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform requires finite lo < hi");
    require(lo >= 0.0, "uniform support must be nonnegative");
    Distribution d(Kind::uniform);
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
  }

  /// `values` strictly increasing, `probs` positive and summing to one (1e-9).
  static Distribution finite(std::vector<double> values, std::vector<double> probs) {
    require(!values.empty() && values.size() == probs.size(),
            "finite law needs matching, nonempty values/probs");
    for (std::size_t i = 0; i < values.size(); ++i) {
      require(std::isfinite(values[i]) && values[i] >= 0.0, "finite law values must be nonnegative");
      require(probs[i] > 0.0, "finite law probabilities must be positive");
      if (i > 0) require(values[i] > values[i - 1], "finite law values must be strictly increasing");
    }
    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    require(std::abs(total - 1.0) <= 1e-9, "finite law probabilities must sum to 1");
    if (values.size() == 1) return point_mass(values[0]);
    Distribution d(Kind::finite);
    d.values_ = std::move(values);
    d.probs_ = std::move(probs);
    for (auto& p : d.probs_) p /= total;
    d.cum_.assign(d.probs_.size() + 1, 0.0);
    for (std::size_t i = 0; i < d.probs_.size(); ++i) d.cum_[i + 1] = d.cum_[i] + d.probs_[i];
    d.cum_.back() = 1.0;
    return d;
  }

  static Distribution mixture(std::vector<double> weights, std::vector<Distribution> components) {
    require(!components.empty() && weights.size() == components.size(),
            "mixture needs matching, nonempty weights/components");
    for (double w : weights) require(w > 0.0, "mixture weights must be positive");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    require(std::abs(total - 1.0) <= 1e-9, "mixture weights must sum to 1");
    Distribution d(Kind::mixture);
    d.probs_ = std::move(weights);
    for (auto& w : d.probs_) w /= total;
    d.components_ = std::move(components);
    return d;
  }

  Kind kind() const noexcept { return kind_; }

  double cdf(double t) const {
    switch (kind_) {
      case Kind::point_mass:
        return t >= values_[0] ? 1.0 : 0.0;
      case Kind::uniform:
        return t <= lo_ ? 0.0 : (t >= hi_ ? 1.0 : (t - lo_) / (hi_ - lo_));
      case Kind::finite:
        return cum_[static_cast<std::size_t>(std::upper_bound(values_.begin(), values_.end(), t) -
                                             values_.begin())];
      case Kind::mixture: {
        double s = 0.0;
        for (std::size_t i = 0; i < components_.size(); ++i) s += probs_[i] * components_[i].cdf(t);
        return std::min(s, 1.0);
      }
    }
    return 0.0;
  }

  /// P(V < t).
  double cdf_left(double t) const {
    switch (kind_) {
      case Kind::point_mass:
        return t > values_[0] ? 1.0 : 0.0;
      case Kind::uniform:
        return cdf(t);
      case Kind::finite:
        return cum_[static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), t) -
                                             values_.begin())];
      case Kind::mixture: {
        double s = 0.0;
        for (std::size_t i = 0; i < components_.size(); ++i)
          s += probs_[i] * components_[i].cdf_left(t);
        return std::min(s, 1.0);
      }
    }
    return 0.0;
  }

  /// P(V = t); for mixtures the weighted sum of component atoms.
  double atom_mass(double t) const {
    switch (kind_) {
      case Kind::point_mass:
        return t == values_[0] ? 1.0 : 0.0;
      case Kind::uniform:
        return 0.0;
      case Kind::finite: {
        auto it = std::lower_bound(values_.begin(), values_.end(), t);
        return (it != values_.end() && *it == t) ? probs_[static_cast<std::size_t>(it - values_.begin())]
                                                 : 0.0;
      }
      case Kind::mixture: {
        double s = 0.0;
        for (std::size_t i = 0; i < components_.size(); ++i)
          s += probs_[i] * components_[i].atom_mass(t);
        return s;
      }
    }
    return 0.0;
  }

  /// inf{t : cdf(t) >= q} for q in (0, 1]; support_min() for q <= 0.
  double quantile(double q) const {
    if (q <= 0.0) return support_min();
    switch (kind_) {
      case Kind::point_mass:
        return values_[0];
      case Kind::uniform:
        return q >= 1.0 ? hi_ : lo_ + q * (hi_ - lo_);
      case Kind::finite: {
        auto it = std::lower_bound(cum_.begin() + 1, cum_.end(), q);
        if (it == cum_.end()) return values_.back();
        return values_[static_cast<std::size_t>(it - cum_.begin()) - 1];
      }
      case Kind::mixture:
        break;
    }
    double lo = support_min();
    double hi = support_max();
    if (cdf(lo) >= q) return lo;
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) >= q ? hi : lo) = mid;
    }
    const auto at = atoms();
    auto it = std::lower_bound(at.begin(), at.end(), lo);
    if (it != at.end() && *it <= hi && cdf(*it) >= q) return *it;
    return hi;
  }

  double mean() const {
    switch (kind_) {
      case Kind::point_mass:
        return values_[0];
      case Kind::uniform:
        return 0.5 * (lo_ + hi_);
      case Kind::finite: {
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * probs_[i];
        return s;
      }
      case Kind::mixture: {
        double s = 0.0;
        for (std::size_t i = 0; i < components_.size(); ++i) s += probs_[i] * components_[i].mean();
        return s;
      }
    }
    return 0.0;
  }

  double support_min() const {
    switch (kind_) {
      case Kind::uniform:
        return lo_;
      case Kind::mixture: {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : components_) m = std::min(m, c.support_min());
        return m;
      }
      default:
        return values_.front();
    }
  }

  double support_max() const {
    switch (kind_) {
      case Kind::uniform:
        return hi_;
      case Kind::mixture: {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& c : components_) m = std::max(m, c.support_max());
        return m;
      }
      default:
        return values_.back();
    }
  }

  /// Sorted locations carrying positive mass.
  std::vector<double> atoms() const {
    std::vector<double> out;
    collect_points(out, /*include_edges=*/false);
    return out;
  }

  /// Sorted points where the cdf is not smooth (atoms and uniform endpoints).
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    collect_points(out, /*include_edges=*/true);
    return out;
  }

  /// True when the law is purely atomic.
  bool is_discrete() const {
    switch (kind_) {
      case Kind::uniform:
        return false;
      case Kind::mixture:
        return std::all_of(components_.begin(), components_.end(),
                           [](const Distribution& c) { return c.is_discrete(); });
      default:
        return true;
    }
  }

  /// (value, mass) pairs of a discrete law, sorted by value.
  std::vector<std::pair<double, double>> discrete_support() const {
    require(is_discrete(), "discrete_support on a law with a continuous part");
    std::vector<std::pair<double, double>> out;
    for (double a : atoms()) out.emplace_back(a, atom_mass(a));
    return out;
  }

  template <class R>
  double sample(R& rng) const {
    switch (kind_) {
      case Kind::point_mass:
        return values_[0];
      case Kind::uniform:
        return lo_ + rng.uniform() * (hi_ - lo_);
      case Kind::finite: {
        const double u = rng.uniform();
        auto it = std::upper_bound(cum_.begin() + 1, cum_.end(), u);
        if (it == cum_.end()) return values_.back();
        return values_[static_cast<std::size_t>(it - cum_.begin()) - 1];
      }
      case Kind::mixture: {
        const double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < components_.size(); ++i) {
          acc += probs_[i];
          if (u < acc) return components_[i].sample(rng);
        }
        return components_.back().sample(rng);
      }
    }
    return 0.0;
  }

  // Raw fields, for serialization.
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  const std::vector<Distribution>& components() const noexcept { return components_; }

 private:
  explicit Distribution(Kind k) : kind_(k) {}

  void collect_points(std::vector<double>& out, bool include_edges) const {
    switch (kind_) {
      case Kind::uniform:
        if (include_edges) {
          out.push_back(lo_);
          out.push_back(hi_);
        }
        break;
      case Kind::mixture:
        for (const auto& c : components_) c.collect_points(out, include_edges);
        break;
      default:
        out.insert(out.end(), values_.begin(), values_.end());
        break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }

  Kind kind_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> values_;  // point mass / finite support
  std::vector<double> probs_;   // finite masses or mixture weights
  std::vector<double> cum_;     // cum_[k] = P(V < values_[k]), cum_.back() = 1
  std::vector<Distribution> components_;
};

/// Result of inverting the law of the maximum.
struct QuantileResult {
  double threshold = 0.0;
  /// The level falls inside a jump of the max cdf: no exact solution exists
  /// and stochastic tie-breaking at `threshold` is required.
  bool is_atom = false;
};

/// An ordered collection of independent variables and the law of their maximum.
class Instance {
 public:
  explicit Instance(std::vector<Distribution> dists) : dists_(std::move(dists)) {
    require(!dists_.empty(), "instance must contain at least one distribution");
    lo_ = -std::numeric_limits<double>::infinity();
    hi_ = -std::numeric_limits<double>::infinity();
    for (const auto& d : dists_) {
      lo_ = std::max(lo_, d.support_min());
      hi_ = std::max(hi_, d.support_max());
      auto a = d.atoms();
      atoms_.insert(atoms_.end(), a.begin(), a.end());
      auto b = d.breakpoints();
      breaks_.insert(breaks_.end(), b.begin(), b.end());
    }
    for (auto* v : {&atoms_, &breaks_}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
  }

  std::size_t size() const noexcept { return dists_.size(); }
  const Distribution& operator[](std::size_t i) const { return dists_[i]; }
  const std::vector<Distribution>& dists() const noexcept { return dists_; }

  /// P(max <= t) = product of member cdfs.
  double cdf_max(double t) const {
    double p = 1.0;
    for (const auto& d : dists_) {
      p *= d.cdf(t);
      if (p == 0.0) break;
    }
    return p;
  }

  /// P(max < t).
  double cdf_max_left(double t) const {
    double p = 1.0;
    for (const auto& d : dists_) {
      p *= d.cdf_left(t);
      if (p == 0.0) break;
    }
    return p;
  }

  /// Lower end of the support of the maximum.
  double max_support_min() const noexcept { return lo_; }
  /// Upper end of the support of the maximum.
  double max_support_max() const noexcept { return hi_; }
  /// Union of member atoms, sorted.
  const std::vector<double>& atoms() const noexcept { return atoms_; }
  /// Union of member breakpoints, sorted.
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }

  bool is_discrete() const {
    return std::all_of(dists_.begin(), dists_.end(), [](const Distribution& d) { return d.is_discrete(); });
  }

  /// tau = inf{t : cdf_max(t) >= q}; q = 0 yields kAcceptAll.
  ///
  /// Bisection on the max cdf down to a 1e-12 relative bracket, then snapped
  /// onto an atom inside the final bracket when one reaches the level.
  QuantileResult quantile_max(double q) const {
    require(q >= 0.0 && q <= 1.0, "quantile level must lie in [0, 1]");
    if (q == 0.0) return {kAcceptAll, false};
    double lo = lo_;
    double hi = hi_;
    if (cdf_max(lo) >= q) return finish(lo, q);
    // invariant: cdf_max(lo) < q <= cdf_max(hi)
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (cdf_max(mid) >= q ? hi : lo) = mid;
    }
    return finish(snap_to_atom(lo, hi, q), q);
  }

 private:
  double snap_to_atom(double lo, double hi, double q) const {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), lo);
    for (; it != atoms_.end() && *it <= hi; ++it)
      if (cdf_max(*it) >= q) return *it;
    return hi;
  }

  QuantileResult finish(double tau, double q) const {
    const double left = cdf_max_left(tau);
    const double right = cdf_max(tau);
    return {tau, left <= q && q < right};
  }

  std::vector<Distribution> dists_;
  double lo_;
  double hi_;
  std::vector<double> atoms_;
  std::vector<double> breaks_;
};

/// Arrival order and (for randomized blind strategies) the uniforms u_1..u_n.
struct PermutationDraw {
  std::vector<std::size_t> order;  // order[i] = index of the variable shown at step i
  std::vector<double> uniforms;

  static PermutationDraw identity(std::size_t n) {
    PermutationDraw d;
    d.order.resize(n);
    std::iota(d.order.begin(), d.order.end(), std::size_t{0});
    return d;
  }

  /// Fisher-Yates order; uniforms drawn afterwards from the same stream when requested.
  template <class R>
  static PermutationDraw random(std::size_t n, R& rng, bool with_uniforms) {
    PermutationDraw d = identity(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(d.order[i], d.order[j]);
    }
    if (with_uniforms) {
      d.uniforms.resize(n);
      for (auto& u : d.uniforms) u = rng.uniform();
    }
    return d;
  }

  bool is_permutation() const {
    std::vector<bool> seen(order.size(), false);
    for (auto i : order) {
      if (i >= order.size() || seen[i]) return false;
      seen[i] = true;
    }
    return true;
  }
};

/// One realization per variable, reproducible from `seed`.
inline std::vector<double> sample_instance(const Instance& instance, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x5a3d1e));
  std::vector<double> out;
  out.reserve(instance.size());
  for (const auto& d : instance.dists()) out.push_back(d.sample(rng));
  return out;
}

/// E[max] by summing over the support of the maximum; discrete instances only.
inline double prophet_value_exact(const Instance& instance) {
  require(instance.is_discrete(), "exact prophet value needs a purely atomic instance");
  double s = 0.0;
  for (double t : instance.atoms()) s += t * (instance.cdf_max(t) - instance.cdf_max_left(t));
  return s;
}

/// E[max] = integral of 1 - cdf_max over [0, sup], split at every breakpoint.
inline double prophet_value_quadrature(const Instance& instance, double tol = 1e-9) {
  const double top = instance.max_support_max();
  if (!std::isfinite(top)) fail_numerical("infinite prophet value");
  std::vector<double> cuts{0.0};
  for (double b : instance.breakpoints())
    if (b > 0.0 && b < top) cuts.push_back(b);
  cuts.push_back(top);
  const auto survival = [&](double t) { return 1.0 - instance.cdf_max(t); };
  const double piece_tol = tol / static_cast<double>(cuts.size());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    // open the piece slightly so atoms at the ends do not leak into it
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const double left = std::nextafter(a, b);
    const double right = std::nextafter(b, a);
    if (right > left) s += quad::adaptive_simpson(survival, left, right, piece_tol);
    s += (left - a) * survival(a) + (b - right) * survival(right);
  }
  if (!std::isfinite(s)) fail_numerical("infinite prophet value");
  return s;
}

/// E[max{V_1..V_n}].
inline double prophet_value(const Instance& instance) {
  return instance.is_discrete() ? prophet_value_exact(instance) : prophet_value_quadrature(instance);
}

}  // namespace prophet
