#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "prophet/alpha.hpp"
#include "prophet/core_model.hpp"
#include "prophet/error.hpp"
#include "prophet/rng.hpp"
#include "prophet/thresholds.hpp"

namespace prophet {

enum class Mode { blind, deterministic };

inline const char* to_string(Mode m) { return m == Mode::blind ? "blind" : "deterministic"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "blind") return Mode::blind;
  if (s == "deterministic") return Mode::deterministic;
  fail_validation("unknown mode '" + s + "' (expected blind|deterministic)");
}

/// Monte Carlo estimate of E[V_sigma_T] against E[max].
struct SimReport {
  std::size_t trials = 0;
  double mean_reward = 0.0;
  double std_error = 0.0;
  double prophet = 0.0;
  double ratio = 0.0;
  double ratio_ci_radius = 0.0;  ///< 3 sigma
  std::uint64_t seed = 0;
};

/// Worker count: explicit value, else PROPHET_LAB_THREADS, else hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PROPHET_LAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Compensated summation.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

namespace detail {

inline constexpr std::size_t kChunkTrials = 4096;
inline constexpr std::uint64_t kTrialStream = 0x51a1;

/// Runs `trials` trials in fixed-size chunks. Chunk k draws from streams
/// derived from (seed, k), and chunk results are combined in chunk order, so
/// the outcome does not depend on the number of workers.
template <class MakeWorker, class Chunk>
std::vector<Chunk> run_chunked(std::size_t trials, std::uint64_t seed, unsigned threads,
                               const MakeWorker& make_worker) {
  const std::size_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<Chunk> results(chunks);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  const auto body = [&](unsigned w) {
    try {
      auto worker = make_worker();
      for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
        const std::size_t count = std::min(kChunkTrials, trials - c * kChunkTrials);
        Rng main(derive_seed(seed, kTrialStream, c));
        Rng ties(derive_seed(seed, kTieStream, c));
        worker.begin_chunk();
        Chunk& out = results[c];
        for (std::size_t t = 0; t < count; ++t) out.add(worker.trial(main, ties));
      }
    } catch (...) {
      errors[w] = std::current_exception();
      next.store(chunks);
    }
  };
  const unsigned used = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(chunks, 1)));
  if (used <= 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < used; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

/// Inverse of the max cdf, accelerated by a bracketing table.
///
/// Same contract as Instance::quantile_max (1e-12 relative bracket, atom
/// snapping); the table plus safeguarded false position only cut the number
/// of cdf evaluations.
class MaxLawInverter {
 public:
  explicit MaxLawInverter(const Instance& inst, std::size_t cells = 1024) : inst_(&inst) {
    const double lo = inst.max_support_min();
    const double hi = inst.max_support_max();
    t_.resize(cells + 1);
    c_.resize(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
      t_[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells);
      c_[k] = inst.cdf_max(t_[k]);
    }
    t_.back() = hi;
    c_.back() = 1.0;
  }

  double quantile(double q) const {
    if (q <= 0.0) return kAcceptAll;
    if (c_[0] >= q) return t_[0];
    const auto k = static_cast<std::size_t>(std::lower_bound(c_.begin(), c_.end(), q) - c_.begin());
    double lo = t_[k - 1], hi = t_[k];
    double flo = c_[k - 1] - q, fhi = c_[k] - q;  // flo < 0 <= fhi
    int side = 0;
    while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
      double mid = (fhi - flo) > 0.0 ? lo - flo * (hi - lo) / (fhi - flo) : 0.5 * (lo + hi);
      if (!(mid > lo && mid < hi) || side == 2 || side == -2) {
        mid = 0.5 * (lo + hi);
        side = 0;
      }
      const double fm = inst_->cdf_max(mid) - q;
      if (fm >= 0.0) {
        hi = mid;
        fhi = fm;
        if (side > 0) flo *= 0.5;  // Illinois
        side = side > 0 ? side + 1 : 1;
      } else {
        lo = mid;
        flo = fm;
        if (side < 0) fhi *= 0.5;
        side = side < 0 ? side - 1 : -1;
      }
      if (mid == lo && mid == hi) break;
    }
    const auto& at = inst_->atoms();
    for (auto it = std::upper_bound(at.begin(), at.end(), lo); it != at.end() && *it <= hi; ++it)
      if (inst_->cdf_max(*it) >= q) return *it;
    return hi;
  }

 private:
  const Instance* inst_;
  std::vector<double> t_;
  std::vector<double> c_;
};

struct Outcome {
  std::size_t stop = 0;  ///< 0-based step, or n when the gambler never stops
  double reward = 0.0;
};

/// One gambler; reuses its buffers across trials.
class Gambler {
 public:
  Gambler(const Instance& inst, const AlphaStrategy* alpha, const ThresholdSchedule* fixed)
      : inst_(&inst), alpha_(alpha), fixed_(fixed), inverter_(inst), perm_(inst.size()) {
    if (fixed_ == nullptr) return;
    const std::size_t n = inst.size();
    rule_of_.assign(n, nullptr);
    for (const auto& r : fixed_->atoms) rule_of_[r.pos] = &r.accept;
    // dense acceptance table when it is small; NaN marks a missing entry
    if (fixed_->atoms.size() * n <= (std::size_t{1} << 22)) {
      dense_.assign(fixed_->atoms.size() * n, std::numeric_limits<double>::quiet_NaN());
      row_of_.assign(n, kNoRow);
      for (std::size_t k = 0; k < fixed_->atoms.size(); ++k) {
        row_of_[fixed_->atoms[k].pos] = k;
        for (const auto& [j, p] : fixed_->atoms[k].accept) dense_[k * n + j] = p;
      }
    }
  }

  void begin_chunk() {
    for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = i;
  }

  Outcome trial(Rng& rng, Rng& ties) {
    const std::size_t n = perm_.size();
    double u = 0.0;  // running order statistic (blind mode)
    for (std::size_t i = 0; i < n; ++i) {
      // lazy Fisher-Yates: only the prefix that is actually observed
      const std::size_t pick = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(perm_[i], perm_[pick]);
      const std::size_t j = perm_[i];

      double tau;
      if (fixed_ != nullptr) {
        tau = fixed_->tau[i];
      } else {
        // u_[i+1] given u_[i]: the minimum of n - i fresh uniforms on [u, 1]
        const double w = rng.uniform();
        u = 1.0 - (1.0 - u) * std::pow(1.0 - w, 1.0 / static_cast<double>(n - i));
        const double q = std::clamp((*alpha_)(u), 0.0, 1.0);
        tau = threshold(q);
        const double v = inst_->dists()[j].sample(rng);
        if (v > tau) return {i, v};
        if (v == tau && ties.uniform() < tie_accept(q, tau, j)) return {i, v};
        continue;
      }
      const double v = inst_->dists()[j].sample(rng);
      if (v > tau) return {i, v};
      if (v == tau && ties.uniform() < fixed_accept(i, j)) return {i, v};
    }
    return {n, 0.0};
  }

 private:
  static constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

  double fixed_accept(std::size_t pos, std::size_t j) const {
    if (!row_of_.empty()) {
      const std::size_t row = row_of_[pos];
      const double p = row == kNoRow ? std::numeric_limits<double>::quiet_NaN() : dense_[row * perm_.size() + j];
      if (std::isnan(p)) fail_validation("unresolved tie");
      return p;
    }
    const TieBreak* rule = rule_of_[pos];
    if (rule == nullptr) fail_validation("unresolved tie");
    auto it = rule->find(j);
    if (it == rule->end()) fail_validation("unresolved tie");
    return it->second;
  }

  double threshold(double q) {
    if (q == last_q_) return last_tau_;
    last_q_ = q;
    last_tau_ = inverter_.quantile(q);
    return last_tau_;
  }

  double tie_accept(double q, double tau, std::size_t j) {
    const auto& at = inst_->atoms();
    if (!std::binary_search(at.begin(), at.end(), tau)) return 0.0;
    if (!(q == tie_q_ && tau == tie_tau_)) {
      const double top = inst_->cdf_max(tau);
      const double bottom = inst_->cdf_max_left(tau);
      tie_rule_ = bottom < top ? tie_break_probabilities(*inst_, tau, std::clamp(q, bottom, top)) : TieBreak{};
      tie_q_ = q;
      tie_tau_ = tau;
    }
    auto it = tie_rule_.find(j);
    return it == tie_rule_.end() ? 0.0 : it->second;
  }

  const Instance* inst_;
  const AlphaStrategy* alpha_;
  const ThresholdSchedule* fixed_;
  MaxLawInverter inverter_;
  std::vector<std::size_t> perm_;
  double last_q_ = -1.0;
  double last_tau_ = 0.0;
  double tie_q_ = -1.0;
  double tie_tau_ = 0.0;
  TieBreak tie_rule_;
  std::vector<const TieBreak*> rule_of_;
  std::vector<std::size_t> row_of_;
  std::vector<double> dense_;
};

struct RewardChunk {
  KahanSum sum;
  KahanSum sum_sq;
  std::size_t count = 0;
  void add(const Outcome& o) {
    sum.add(o.reward);
    sum_sq.add(o.reward * o.reward);
    ++count;
  }
};

inline SimReport summarize(const std::vector<RewardChunk>& chunks, double prophet, std::uint64_t seed) {
  KahanSum s, s2;
  std::size_t n = 0;
  for (const auto& c : chunks) {
    s.add(c.sum.sum);
    s2.add(c.sum_sq.sum);
    n += c.count;
  }
  SimReport r;
  r.trials = n;
  r.seed = seed;
  r.prophet = prophet;
  r.mean_reward = s.sum / static_cast<double>(n);
  const double var =
      n > 1 ? std::max(0.0, (s2.sum - s.sum * r.mean_reward) / static_cast<double>(n - 1)) : 0.0;
  r.std_error = std::sqrt(var / static_cast<double>(n));
  r.ratio = prophet > 0.0 ? r.mean_reward / prophet : 0.0;
  r.ratio_ci_radius = prophet > 0.0 ? 3.0 * r.std_error / prophet : 0.0;
  return r;
}

}  // namespace detail

/// Monte Carlo evaluation of the blind (or deterministic blind) strategy alpha.
///
/// Each trial draws a fresh arrival order and fresh realizations (plus, in blind
/// mode, fresh uniforms). Ties at atom thresholds are broken stochastically.
inline SimReport monte_carlo(const Instance& instance, const AlphaStrategy& alpha, Mode mode,
                             std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
  require(trials >= 1, "trials must be >= 1");
  const double prophet = prophet_value(instance);
  std::optional<ThresholdSchedule> fixed;
  if (mode == Mode::deterministic) fixed = build_deterministic(instance, alpha);
  const ThresholdSchedule* fixed_ptr = fixed ? &*fixed : nullptr;
  const auto make = [&] { return detail::Gambler(instance, &alpha, fixed_ptr); };
  const auto results =
      detail::run_chunked<decltype(make), detail::RewardChunk>(trials, seed, resolve_threads(threads), make);
  return detail::summarize(results, prophet, seed);
}

/// Monte Carlo evaluation of a fixed schedule (run through Stochastic TTA).
inline SimReport simulate_schedule(const Instance& instance, const ThresholdSchedule& schedule,
                                   std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
  require(trials >= 1, "trials must be >= 1");
  require(schedule.size() == instance.size(), "schedule length must match the instance");
  const double prophet = prophet_value(instance);
  const auto make = [&] { return detail::Gambler(instance, nullptr, &schedule); };
  const auto results =
      detail::run_chunked<decltype(make), detail::RewardChunk>(trials, seed, resolve_threads(threads), make);
  return detail::summarize(results, prophet, seed);
}

/// Empirical P(T <= k), k = 1..n, for the deterministic blind strategy, with 3 sigma radii.
struct StopCdfReport {
  std::vector<double> cdf;
  std::vector<double> radius;
  std::size_t trials = 0;
};

namespace detail {

struct StopChunk {
  std::vector<std::uint64_t> hits;
  std::size_t count = 0;
  void add(const Outcome& o) {
    if (o.stop >= hits.size()) hits.resize(o.stop + 1, 0);
    ++hits[o.stop];
    ++count;
  }
};

}  // namespace detail

inline StopCdfReport empirical_stop_cdf(const Instance& instance, const AlphaStrategy& alpha,
                                        std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
  require(trials >= 1, "trials must be >= 1");
  const auto schedule = build_deterministic(instance, alpha);
  const auto make = [&] { return detail::Gambler(instance, nullptr, &schedule); };
  const auto results =
      detail::run_chunked<decltype(make), detail::StopChunk>(trials, seed, resolve_threads(threads), make);
  const std::size_t n = instance.size();
  std::vector<std::uint64_t> hits(n + 1, 0);
  for (const auto& c : results)
    for (std::size_t k = 0; k < c.hits.size(); ++k) hits[k] += c.hits[k];
  StopCdfReport out;
  out.trials = trials;
  std::uint64_t acc = 0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += hits[k];
    const double p = static_cast<double>(acc) / static_cast<double>(trials);
    out.cdf.push_back(p);
    out.radius.push_back(3.0 * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(trials)));
  }
  return out;
}

/// Exact E[V_sigma_T] of a fixed schedule on a purely atomic instance.
///
/// Averages over all n! arrival orders. For a fixed order the thresholds are
/// deterministic and the variables independent, so the outcome space factors
/// step by step: E = sum_i P(reach i) E[V accept_i], with ties weighted by the
/// schedule's acceptance probabilities.
inline double exact_eval_schedule(const Instance& instance, const ThresholdSchedule& schedule) {
  const std::size_t n = instance.size();
  require(instance.is_discrete(), "exact evaluation needs a purely atomic instance");
  require(n <= 8, "exact evaluation is limited to n <= 8");
  require(schedule.size() == n, "schedule length must match the instance");
  double support = 1.0;
  for (const auto& d : instance.dists()) support *= static_cast<double>(d.discrete_support().size());
  require(support <= 1e6, "exact evaluation: product support exceeds 1e6");

  // accept[j][i], gain[j][i]: P(take V_j at step i) and E[V_j; take at step i]
  std::vector<std::vector<double>> accept(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> gain(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    const auto sup = instance[j].discrete_support();
    for (std::size_t i = 0; i < n; ++i) {
      const double tau = schedule.tau[i];
      double tie = 0.0;
      if (const auto* r = schedule.rule_at(i)) {
        auto it = r->accept.find(j);
        if (it != r->accept.end()) tie = it->second;
      }
      for (const auto& [v, p] : sup) {
        double take = 0.0;
        if (v > tau) {
          take = 1.0;
        } else if (v == tau) {
          if (schedule.rule_at(i) == nullptr) fail_validation("unresolved tie");
          take = tie;
        }
        accept[j][i] += p * take;
        gain[j][i] += p * take * v;
      }
    }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  KahanSum total;
  std::size_t perms = 0;
  do {
    double reach = 1.0;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      value += reach * gain[order[i]][i];
      reach *= 1.0 - accept[order[i]][i];
    }
    total.add(value);
    ++perms;
  } while (std::next_permutation(order.begin(), order.end()));
  return total.sum / static_cast<double>(perms);
}

/// Exact E[V_sigma_T] of the deterministic blind strategy alpha.
inline double exact_eval(const Instance& instance, const AlphaStrategy& alpha) {
  require(instance.size() <= 8, "exact evaluation is limited to n <= 8");
  return exact_eval_schedule(instance, build_deterministic(instance, alpha));
}

}  // namespace prophet
