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

#ifndef DPMEDIAN_SAMPLERS_HPP_
#define DPMEDIAN_SAMPLERS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "dpmedian/core.hpp"
#include "dpmedian/envelope.hpp"

namespace dpmedian {

// Seeded 64-bit Mersenne Twister. Reproducible, not cryptographically secure.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::mt19937_64& engine() noexcept { return engine_; }
  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

inline void check_interval(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a <= b)) {
    throw Error(ErrorCode::kEmptyInterval, "need finite a <= b");
  }
}

inline double sample_uniform(double a, double b, RandomSource& rng) {
  check_interval(a, b);
  if (a == b) return a;
  const double x = a + (b - a) * rng.next_unit();
  return std::min(x, b);
}

// Index drawn with probability proportional to exp(log_weights[i]).
inline std::size_t sample_categorical_log(std::span<const double> log_weights,
                                          RandomSource& rng) {
  if (log_weights.empty()) {
    throw Error(ErrorCode::kAllWeightsZero, "no categories");
  }
  double top = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::kInvalidData, "log weight is NaN or +inf");
    }
    top = std::max(top, lw);
  }
  if (top == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::kAllWeightsZero, "all weights are zero");
  }
  std::vector<double> prefix(log_weights.size());
  double acc = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    const double w = std::exp(log_weights[i] - top);
    if (w > 0) last = i;
    acc += w;
    prefix[i] = acc;
  }
  const double target = rng.next_unit() * acc;
  const auto it = std::upper_bound(prefix.begin(), prefix.end(), target);
  const auto idx = static_cast<std::size_t>(it - prefix.begin());
  return std::min(idx, last);
}

// Index drawn with probability proportional to weights[i] >= 0.
inline std::size_t sample_categorical(std::span<const double> weights,
                                      RandomSource& rng) {
  std::vector<double> logs;
  logs.reserve(weights.size());
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidData, "weights must be finite and >= 0");
    }
    logs.push_back(std::log(w));
  }
  return sample_categorical_log(logs, rng);
}

// Density proportional to exp(alpha * x) on [a, b], by inverse CDF.
inline double sample_truncated_exponential(double alpha, double a, double b,
                                           RandomSource& rng) {
  check_interval(a, b);
  if (!std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidData, "alpha must be finite");
  }
  if (a == b) return a;
  const double u = rng.next_unit();
  const double width = b - a;
  const double q = -std::expm1(-std::abs(alpha) * width);
  double x;
  if (alpha == 0 || q == 0) {
    x = a + width * u;
  } else if (alpha > 0) {
    x = b + std::log1p(-(1 - u) * q) / alpha;
  } else {
    x = a + std::log1p(-u * q) / alpha;
  }
  return std::clamp(x, a, b);
}

// Density proportional to exp(-|x - mu| / sigma) on [a, b].
inline double sample_truncated_laplace(double mu, double sigma, double a,
                                       double b, RandomSource& rng) {
  check_interval(a, b);
  if (!std::isfinite(sigma) || !(sigma > 0)) {
    throw Error(ErrorCode::kNonpositiveScale, "sigma must be > 0");
  }
  if (!std::isfinite(mu)) {
    throw Error(ErrorCode::kInvalidData, "mu must be finite");
  }
  if (a == b) return a;
  const double inv = 1 / sigma;
  if (mu <= a) return sample_truncated_exponential(-inv, a, b, rng);
  if (mu >= b) return sample_truncated_exponential(inv, a, b, rng);
  const double sides[] = {
      segment_log_mass(inv, -mu * inv, a, mu),
      segment_log_mass(-inv, mu * inv, mu, b),
  };
  if (sample_categorical_log(sides, rng) == 0) {
    return sample_truncated_exponential(inv, a, mu, rng);
  }
  return sample_truncated_exponential(-inv, mu, b, rng);
}

// Draw from the restricted density around median m.
inline double sample_restricted(double m, const MechanismConfig& cfg,
                                RandomSource& rng) {
  if (!(cfg.median_lo() <= m && m <= cfg.median_hi())) {
    throw Error(ErrorCode::kOutOfSupport, "median outside the median range");
  }
  const double big_b = cfg.support_bound();
  const double rad = cfg.center_radius();
  const double sigma = cfg.laplace_scale();
  const double q = cfg.epsilon() * cfg.flat_drop() / 2;
  const double lo = m - rad;
  const double hi = m + rad;
  const double masses[] = {
      -q + std::log(lo + big_b),
      std::log(2 * sigma) + std::log(-std::expm1(-q)),
      -q + std::log(big_b - hi),
  };
  switch (sample_categorical_log(masses, rng)) {
    case 0: return sample_uniform(-big_b, lo, rng);
    case 1: return sample_truncated_laplace(m, sigma, lo, hi, rng);
    default: return sample_uniform(hi, big_b, rng);
  }
}

// Draw from an explicit piecewise-exponential density.
inline double sample_piecewise(const PiecewiseExpDensity& density,
                               RandomSource& rng) {
  const auto& segs = density.segments();
  std::vector<double> masses;
  masses.reserve(segs.size());
  for (const auto& sg : segs) masses.push_back(sg.log_mass);
  const ExpSegment& sg = segs[sample_categorical_log(masses, rng)];
  return sample_truncated_exponential(sg.alpha, sg.lo, sg.hi, rng);
}

}  // namespace dpmedian

#endif  // DPMEDIAN_SAMPLERS_HPP_
