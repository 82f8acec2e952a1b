// Copyright 2026 The dpmedian Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMEDIAN_LAB_HPP_
#define DPMEDIAN_LAB_HPP_

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dpmedian/core.hpp"
#include "dpmedian/envelope.hpp"
#include "dpmedian/estimator.hpp"
#include "dpmedian/samplers.hpp"
#include "dpmedian/typical_set.hpp"

namespace dpmedian {

enum class DistributionKind {
  kUniformSlab,
  kGaussianKnownVar,
  kTailMixture,
  kBernoulliEmbedded,
};

inline const char* to_string(DistributionKind k) {
  switch (k) {
    case DistributionKind::kUniformSlab: return "UniformSlab";
    case DistributionKind::kGaussianKnownVar: return "GaussianKnownVar";
    case DistributionKind::kTailMixture: return "TailMixture";
    case DistributionKind::kBernoulliEmbedded: return "BernoulliEmbedded";
  }
  return "Unknown";
}

inline std::optional<DistributionKind> parse_distribution_kind(
    const std::string& s) {
  for (auto k : {DistributionKind::kUniformSlab,
                 DistributionKind::kGaussianKnownVar,
                 DistributionKind::kTailMixture,
                 DistributionKind::kBernoulliEmbedded}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

// (L, r, R) under which a distribution is admissible.
struct Certificate {
  double L = 0;
  double r = 0;
  double R = 0;
};

// Test distribution with a unique median and an analytic density bound.
class AdmissibleDistribution {
 public:
  // Unif[m - r, m + r].
  static AdmissibleDistribution uniform_slab(double m, double r, double big_r) {
    require(r > 0, "r must be > 0");
    AdmissibleDistribution d(DistributionKind::kUniformSlab, m,
                             {1 / (2 * r), r, big_r});
    d.a_ = r;
    return d;
  }

  // N(mu, sigma^2) certified on [mu - r, mu + r].
  static AdmissibleDistribution gaussian(double mu, double sigma, double r,
                                         double big_r) {
    require(sigma > 0 && r > 0, "sigma and r must be > 0");
    const double z = r / sigma;
    const double lower =
        std::exp(-z * z / 2) / (sigma * std::sqrt(2 * std::numbers::pi));
    AdmissibleDistribution d(DistributionKind::kGaussianKnownVar, mu,
                             {lower, r, big_r});
    d.a_ = sigma;
    return d;
  }

  // Atoms of mass 1/2 - L r at -2(R + r) and 2(R + r); mass 2 L r uniform on
  // [m - r, m + r].
  static AdmissibleDistribution tail_mixture(double m, double big_l, double r,
                                             double big_r) {
    require(big_l > 0 && r > 0 && big_l * r <= 0.5, "need 0 < L r <= 1/2");
    return AdmissibleDistribution(DistributionKind::kTailMixture, m,
                                  {big_l, r, big_r});
  }

  // Atoms of mass (1 - 2Lr)(1 - p) at -2r and (1 - 2Lr) p at 2r; mass 2 L r
  // uniform on [-r, r]. Certified on the part of [-r, r] around the median.
  static AdmissibleDistribution bernoulli_embedded(double p, double big_l,
                                                   double r, double big_r) {
    require(p >= 0 && p <= 1, "p must lie in [0, 1]");
    require(big_l > 0 && r > 0 && big_l * r <= 0.5, "need 0 < L r <= 1/2");
    const double med = p * (1 / big_l - 2 * r) + r - 1 / (2 * big_l);
    require(std::abs(med) < r, "median must fall inside (-r, r)");
    AdmissibleDistribution d(DistributionKind::kBernoulliEmbedded, med,
                             {big_l, r - std::abs(med), big_r});
    d.a_ = p;
    d.b_ = r;
    return d;
  }

  DistributionKind kind() const noexcept { return kind_; }
  double true_median() const noexcept { return median_; }
  const Certificate& certificate() const noexcept { return cert_; }

  // Kind-specific parameters: UniformSlab {m, r}; GaussianKnownVar
  // {mu, sigma}; TailMixture {m, L, r, R}; BernoulliEmbedded {p, L, r}.
  std::vector<double> params() const {
    switch (kind_) {
      case DistributionKind::kUniformSlab: return {median_, a_};
      case DistributionKind::kGaussianKnownVar: return {median_, a_};
      case DistributionKind::kTailMixture:
        return {median_, cert_.L, cert_.r, cert_.R};
      case DistributionKind::kBernoulliEmbedded: return {a_, cert_.L, b_};
    }
    return {};
  }

  double sample(RandomSource& rng) const {
    switch (kind_) {
      case DistributionKind::kUniformSlab:
        return median_ - a_ + 2 * a_ * rng.next_unit();
      case DistributionKind::kGaussianKnownVar: {
        const double u1 = 1 - rng.next_unit();
        const double u2 = rng.next_unit();
        return median_ + a_ * std::sqrt(-2 * std::log(u1)) *
                             std::cos(2 * std::numbers::pi * u2);
      }
      case DistributionKind::kTailMixture: {
        const double atom = 0.5 - cert_.L * cert_.r;
        const double u = rng.next_unit();
        const double far = 2 * (cert_.R + cert_.r);
        if (u < atom) return -far;
        if (u < 2 * atom) return far;
        return median_ - cert_.r + 2 * cert_.r * rng.next_unit();
      }
      case DistributionKind::kBernoulliEmbedded: {
        const double rest = 1 - 2 * cert_.L * b_;
        const double u = rng.next_unit();
        if (u < rest * (1 - a_)) return -2 * b_;
        if (u < rest) return 2 * b_;
        return -b_ + 2 * b_ * rng.next_unit();
      }
    }
    return 0;
  }

 private:
  AdmissibleDistribution(DistributionKind kind, double median, Certificate c)
      : kind_(kind), median_(median), cert_(c) {
    require(std::isfinite(median), "median must be finite");
    require(std::abs(median) <= c.R, "|median| must be <= R");
    require(c.L > 0 && c.r > 0 && c.L * c.r <= 0.5,
            "certificate needs 0 < L r <= 1/2");
  }

  static void require(bool ok, const std::string& msg) {
    if (!ok) throw Error(ErrorCode::kParameterViolation, msg);
  }

  DistributionKind kind_;
  double median_;
  Certificate cert_;
  double a_ = 0;
  double b_ = 0;
};

inline Dataset sample_admissible(const AdmissibleDistribution& d,
                                 std::size_t n, RandomSource& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = d.sample(rng);
  return Dataset(std::move(v));
}

// Minimum over index subsets S of |S| such that setting X_S = xi gives a
// member of H with left median xi.
inline std::optional<int> brute_force_typical_hamming(
    const Dataset& x, double xi, const MechanismConfig& cfg) {
  check_length(x, cfg);
  const std::size_t n = x.size();
  if (n > 12) {
    throw Error(ErrorCode::kInstanceTooLarge, "brute force needs n <= 12");
  }
  if (!(cfg.median_lo() <= xi && xi <= cfg.median_hi())) return std::nullopt;
  std::optional<int> best;
  std::vector<double> y(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const int size = std::popcount(mask);
    if (best && size >= *best) continue;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = (mask >> i) & 1u ? xi : x.values()[i];
    }
    const Dataset cand(y);
    if (left_median(cand) == xi && is_typical(cand, cfg)) best = size;
  }
  return best;
}

// Trapezoid-rule CDF of an unnormalized density on a uniform grid.
class QuadratureCdf {
 public:
  QuadratureCdf(const std::function<double(double)>& f, double lo, double hi,
                std::size_t grid_size)
      : lo_(lo), hi_(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw Error(ErrorCode::kEmptyInterval, "need finite lo < hi");
    }
    if (grid_size < 1000) {
      throw Error(ErrorCode::kParameterViolation, "grid_size must be >= 1000");
    }
    step_ = (hi - lo) / static_cast<double>(grid_size);
    values_.resize(grid_size + 1);
    cum_.resize(grid_size + 1, 0.0);
    for (std::size_t i = 0; i <= grid_size; ++i) {
      values_[i] = f(node(i));
    }
    for (std::size_t i = 1; i <= grid_size; ++i) {
      cum_[i] = cum_[i - 1] + step_ * (values_[i - 1] + values_[i]) / 2;
    }
    total_ = cum_.back();
    if (!(total_ > 0) || !std::isfinite(total_)) {
      throw Error(ErrorCode::kDegenerateDensity, "density integrates to 0");
    }
  }

  double operator()(double x) const {
    if (x <= lo_) return 0;
    if (x >= hi_) return 1;
    auto i = static_cast<std::size_t>((x - lo_) / step_);
    i = std::min(i, values_.size() - 2);
    const double t = x - node(i);
    const double slope = (values_[i + 1] - values_[i]) / step_;
    const double part = t * (values_[i] + slope * t / 2);
    return std::clamp((cum_[i] + part) / total_, 0.0, 1.0);
  }

  double total() const noexcept { return total_; }

 private:
  double node(std::size_t i) const {
    return i + 1 == values_.size() ? hi_
                                   : lo_ + step_ * static_cast<double>(i);
  }

  double lo_;
  double hi_;
  double step_;
  double total_ = 0;
  std::vector<double> values_;
  std::vector<double> cum_;
};

inline QuadratureCdf quadrature_cdf(const std::function<double(double)>& f,
                                    double lo, double hi,
                                    std::size_t grid_size) {
  return QuadratureCdf(f, lo, hi, grid_size);
}

// One-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

inline std::size_t hamming_distance(const Dataset& x, const Dataset& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "pair sizes differ");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x.values()[i] != y.values()[i]) ++d;
  }
  return d;
}

// Log density of whatever the estimator would sample for X.
class MechanismDensity {
 public:
  MechanismDensity(const Dataset& x, const MechanismConfig& cfg)
      : typical_(is_typical(x, cfg)),
        median_(left_median(x)),
        cfg_(cfg),
        envelope_(build_envelope(x, cfg)),
        restricted_log_z_(typical_ ? restricted_density(median_, cfg).log_z()
                                   : 0.0) {}

  bool typical() const noexcept { return typical_; }
  const PiecewiseExpDensity& envelope() const noexcept { return envelope_; }

  double log_pdf(double omega) const {
    if (typical_) return restricted_log_pdf(omega);
    return envelope_.log_pdf(omega);
  }

  double restricted_log_pdf(double omega) const {
    return restricted_log_density(median_, omega, cfg_) - restricted_log_z_;
  }

 private:
  bool typical_;
  double median_;
  MechanismConfig cfg_;
  PiecewiseExpDensity envelope_;
  double restricted_log_z_;
};

struct PairAudit {
  std::size_t distance = 0;
  bool both_typical = false;
  // max |log f_X - log f_Y| minus the allowed budget, for the densities the
  // estimator samples. Budget is (epsilon/2) d for typical pairs.
  double mechanism_excess = 0;
  // Same for the two envelope densities against epsilon * d.
  double envelope_excess = 0;
};

struct AuditReport {
  std::vector<PairAudit> pairs;
  double max_mechanism_excess = 0;
  double max_envelope_excess = 0;
  bool pass = true;
};

inline constexpr double kAuditTolerance = 1e-9;

inline AuditReport audit_privacy(
    std::span<const std::pair<Dataset, Dataset>> pairs,
    const MechanismConfig& cfg, std::size_t grid_size) {
  if (grid_size < 2) {
    throw Error(ErrorCode::kParameterViolation, "grid_size must be >= 2");
  }
  const double big_b = cfg.support_bound();
  std::vector<double> grid(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    grid[i] = -big_b + 2 * big_b * static_cast<double>(i) /
                           static_cast<double>(grid_size - 1);
  }
  grid.back() = big_b;

  AuditReport rep;
  rep.max_mechanism_excess = -std::numeric_limits<double>::infinity();
  rep.max_envelope_excess = -std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pairs) {
    check_length(x, cfg);
    check_length(y, cfg);
    const MechanismDensity fx(x, cfg);
    const MechanismDensity fy(y, cfg);
    PairAudit pa;
    pa.distance = hamming_distance(x, y);
    pa.both_typical = fx.typical() && fy.typical();
    double mech = 0;
    double env = 0;
    for (double w : grid) {
      mech = std::max(mech, std::abs(fx.log_pdf(w) - fy.log_pdf(w)));
      env = std::max(env, std::abs(fx.envelope().log_pdf(w) -
                                   fy.envelope().log_pdf(w)));
    }
    const double d = static_cast<double>(pa.distance);
    const double budget =
        pa.both_typical ? cfg.epsilon() / 2 * d : cfg.epsilon() * d;
    pa.mechanism_excess = mech - budget;
    pa.envelope_excess = env - cfg.epsilon() * d;
    rep.max_mechanism_excess =
        std::max(rep.max_mechanism_excess, pa.mechanism_excess);
    rep.max_envelope_excess =
        std::max(rep.max_envelope_excess, pa.envelope_excess);
    if (pa.mechanism_excess > kAuditTolerance ||
        pa.envelope_excess > kAuditTolerance) {
      rep.pass = false;
    }
    rep.pairs.push_back(pa);
  }
  return rep;
}

// SplitMix64 finalizer used to derive per-trial seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t base, std::size_t n,
                                std::size_t trial) {
  return mix_seed(base ^ mix_seed(static_cast<std::uint64_t>(n)) ^
                  static_cast<std::uint64_t>(trial));
}

struct AccuracyRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::size_t restricted = 0;
  double rate = 0;
  double seconds = 0;
};

namespace detail {

// Runs body(t) for t in [0, count) across worker threads.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count < 2) {
    for (std::size_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t t = w; t < count; t += threads) body(t);
    });
  }
}

inline unsigned default_threads() {
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

// Failure rate P(|estimate - true median| >= alpha) per n. Each trial draws a
// fresh dataset and runs the estimator with its own seeded source.
inline std::vector<AccuracyRow> run_accuracy_experiment(
    const AdmissibleDistribution& dist, const MechanismParams& tmpl,
    std::span<const std::size_t> n_list, std::size_t trials, double alpha,
    std::uint64_t seed, unsigned threads = detail::default_threads()) {
  if (trials < 100) {
    throw Error(ErrorCode::kParameterViolation, "trials must be >= 100");
  }
  if (!(alpha > 0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kParameterViolation, "alpha must be > 0");
  }
  std::vector<AccuracyRow> rows;
  for (std::size_t n : n_list) {
    const MechanismConfig cfg = with_n(tmpl, n);
    std::vector<char> failed(trials, 0);
    std::vector<char> fast(trials, 0);
    const auto start = std::chrono::steady_clock::now();
    detail::parallel_for(trials, threads, [&](std::size_t t) {
      RandomSource rng(trial_seed(seed, n, t));
      const Dataset x = sample_admissible(dist, n, rng);
      const EstimateReport rep = private_median(x, cfg, rng);
      failed[t] = std::abs(rep.estimate - dist.true_median()) >= alpha;
      fast[t] = rep.branch == Branch::kRestricted;
    });
    AccuracyRow row;
    row.n = n;
    row.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
      row.failures += static_cast<std::size_t>(failed[t]);
      row.restricted += static_cast<std::size_t>(fast[t]);
    }
    row.rate = static_cast<double>(row.failures) / static_cast<double>(trials);
    row.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    rows.push_back(row);
  }
  return rows;
}

struct FastPathRow {
  std::size_t n = 0;
  std::size_t datasets = 0;
  std::size_t restricted = 0;
  double fraction = 0;
};

// Fraction of i.i.d. datasets that land in H, per n.
inline std::vector<FastPathRow> run_fast_path_experiment(
    const AdmissibleDistribution& dist, const MechanismParams& tmpl,
    std::span<const std::size_t> n_list, std::size_t datasets,
    std::uint64_t seed) {
  std::vector<FastPathRow> rows;
  for (std::size_t n : n_list) {
    const MechanismConfig cfg = with_n(tmpl, n);
    FastPathRow row;
    row.n = n;
    row.datasets = datasets;
    for (std::size_t t = 0; t < datasets; ++t) {
      RandomSource rng(trial_seed(seed, n, t));
      if (is_typical(sample_admissible(dist, n, rng), cfg)) ++row.restricted;
    }
    row.fraction =
        static_cast<double>(row.restricted) / static_cast<double>(datasets);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dpmedian

#endif  // DPMEDIAN_LAB_HPP_
