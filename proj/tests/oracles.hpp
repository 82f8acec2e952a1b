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

// Test-only reference implementations. Nothing here calls into the library
// beyond reading config constants.

#ifndef DPMEDIAN_TESTS_ORACLES_HPP_
#define DPMEDIAN_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dpmedian/core.hpp"

namespace oracle {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2 - 1];
}

// Direct transcription of the membership definition.
inline bool typical(const std::vector<double>& v,
                    const dpmedian::MechanismConfig& cfg) {
  const double m = median_of(v);
  if (m < -cfg.R() - cfg.r() / 2 || m > cfg.R() + cfg.r() / 2) return false;
  const double w = cfg.C() / (cfg.L() * static_cast<double>(v.size()));
  const int big_k = static_cast<int>(
      std::floor(cfg.L() * static_cast<double>(v.size()) * cfg.r() /
                 (2 * cfg.C())));
  for (int k = 1; k <= big_k; ++k) {
    const double off = k * w;
    int right = 0;
    int left = 0;
    for (double x : v) {
      if (m <= x && x - off <= m) ++right;
      if (x <= m && m <= x + off) ++left;
    }
    if (right < k + 1 || left < k + 1) return false;
  }
  return true;
}

// Exhaustive search over which coordinates are moved onto xi.
inline std::optional<int> hamming(const std::vector<double>& v, double xi,
                                  const dpmedian::MechanismConfig& cfg) {
  if (xi < -cfg.R() - cfg.r() / 2 || xi > cfg.R() + cfg.r() / 2) {
    return std::nullopt;
  }
  const std::size_t n = v.size();
  int best = static_cast<int>(n) + 1;
  std::vector<double> y(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    int size = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool moved = (mask >> i) & 1u;
      size += moved;
      y[i] = moved ? xi : v[i];
    }
    if (size >= best) continue;
    if (median_of(y) == xi && typical(y, cfg)) best = size;
  }
  return best;
}

// Root of 4 C e exp(-2C/27) = 1/2 above 5, by bisection.
inline double log_n_floor() {
  auto g = [](double c) {
    return 4 * c * std::exp(1.0) * std::exp(-2 * c / 27) - 0.5;
  };
  double lo = 50;
  double hi = 500;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

// Composite Simpson rule with 2*half intervals.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int half = 20000) {
  const int n = 2 * half;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4 : 2) * f(a + i * h);
  return acc * h / 3;
}

// CDF of density proportional to exp(alpha x) on [a, b].
inline double trunc_exp_cdf(double alpha, double a, double b, double x) {
  if (x <= a) return 0;
  if (x >= b) return 1;
  if (alpha == 0) return (x - a) / (b - a);
  return std::expm1(alpha * (x - a)) / std::expm1(alpha * (b - a));
}

// CDF of density proportional to exp(-|x - mu| / sigma) on [a, b].
inline double trunc_laplace_cdf(double mu, double sigma, double a, double b,
                                double x) {
  auto raw = [&](double t) {
    // Integral of exp(-|u - mu|/sigma) from -inf to t.
    if (t <= mu) return sigma * std::exp((t - mu) / sigma);
    return sigma * (2 - std::exp(-(t - mu) / sigma));
  };
  if (x <= a) return 0;
  if (x >= b) return 1;
  return (raw(x) - raw(a)) / (raw(b) - raw(a));
}

// Unnormalized restricted density around m, straight from its definition.
inline double restricted_unnormalized(double m, double w,
                                      const dpmedian::MechanismConfig& cfg) {
  const double ln = cfg.L() * static_cast<double>(cfg.n());
  const double scaled = ln / (3 * cfg.C()) * std::abs(m - w);
  return std::exp(-cfg.epsilon() / 4 * std::min(scaled, cfg.L() * cfg.r() *
                                                            static_cast<double>(cfg.n())));
}

}  // namespace oracle

#endif  // DPMEDIAN_TESTS_ORACLES_HPP_
