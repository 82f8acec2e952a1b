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

#ifndef DPMEDIAN_CORE_HPP_
#define DPMEDIAN_CORE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dpmedian {

enum class ErrorCode {
  kParameterViolation,
  kDatasetTooSmall,
  kInvalidData,
  kLengthMismatch,
  kEmptyInterval,
  kNonpositiveScale,
  kAllWeightsZero,
  kDegenerateDensity,
  kOutOfSupport,
  kInstanceTooLarge,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParameterViolation: return "ParameterViolation";
    case ErrorCode::kDatasetTooSmall: return "DatasetTooSmall";
    case ErrorCode::kInvalidData: return "InvalidData";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInterval: return "EmptyInterval";
    case ErrorCode::kNonpositiveScale: return "NonpositiveScale";
    case ErrorCode::kAllWeightsZero: return "AllWeightsZero";
    case ErrorCode::kDegenerateDensity: return "DegenerateDensity";
    case ErrorCode::kOutOfSupport: return "OutOfSupport";
    case ErrorCode::kInstanceTooLarge: return "InstanceTooLarge";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Smallest C for which 4*C*e*exp(-2C/27) < 1/2 holds for every larger value.
inline constexpr double kLogNMinimumC = 104.31220368280087;

struct ConstantC {
  double value = 6.0;
};

// C = max(kLogNMinimumC, c0 * ln n).
struct LogNC {
  double c0 = 1.0;
};

using CPolicy = std::variant<ConstantC, LogNC>;

inline double effective_c(const CPolicy& policy, std::size_t n) {
  if (const auto* c = std::get_if<ConstantC>(&policy)) return c->value;
  const double scaled = std::get<LogNC>(policy).c0 *
                        std::log(static_cast<double>(n));
  return std::max(kLogNMinimumC, scaled);
}

// User-facing parameters. Turned into a MechanismConfig by validate_config.
struct MechanismParams {
  double L = 0.5;
  double r = 1.0;
  double R = 10.0;
  double epsilon = 0.5;
  CPolicy c_policy = ConstantC{6.0};
  std::size_t n = 0;
};

class MechanismConfig;
MechanismConfig validate_config(const MechanismParams& params);

// Validated configuration with its derived constants. Immutable.
class MechanismConfig {
 public:
  const MechanismParams& params() const noexcept { return params_; }
  double L() const noexcept { return params_.L; }
  double r() const noexcept { return params_.r; }
  double R() const noexcept { return params_.R; }
  double epsilon() const noexcept { return params_.epsilon; }
  std::size_t n() const noexcept { return params_.n; }

  double C() const noexcept { return c_; }
  // B = R + 4Cr.
  double support_bound() const noexcept { return support_bound_; }
  // K = floor(L n r / (2C)).
  int bucket_count() const noexcept { return bucket_count_; }
  // s = L n / (6C).
  double slope() const noexcept { return slope_; }
  // w = C / (L n).
  double bucket_width() const noexcept { return bucket_width_; }
  double median_lo() const noexcept { return -params_.R - params_.r / 2; }
  double median_hi() const noexcept { return params_.R + params_.r / 2; }
  // 3Cr.
  double center_radius() const noexcept { return center_radius_; }
  // L n r / 2.
  double flat_drop() const noexcept { return flat_drop_; }
  // 12C / (L n epsilon).
  double laplace_scale() const noexcept { return laplace_scale_; }
  // Left median index, 1-based: floor(n/2).
  std::size_t median_rank() const noexcept { return params_.n / 2; }

  // Offset kappa * w used by every bucket test.
  double bucket_offset(int kappa) const noexcept {
    return static_cast<double>(kappa) * bucket_width_;
  }

 private:
  friend MechanismConfig validate_config(const MechanismParams& params);
  MechanismConfig() = default;

  MechanismParams params_;
  double c_ = 0;
  double support_bound_ = 0;
  int bucket_count_ = 0;
  double slope_ = 0;
  double bucket_width_ = 0;
  double center_radius_ = 0;
  double flat_drop_ = 0;
  double laplace_scale_ = 0;
};

inline MechanismConfig validate_config(const MechanismParams& p) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kParameterViolation, msg);
  };
  if (!std::isfinite(p.L) || !(p.L > 0)) fail("L must be finite and > 0");
  if (!std::isfinite(p.r) || !(p.r > 0)) fail("r must be finite and > 0");
  if (!std::isfinite(p.R) || !(p.R > 0)) fail("R must be finite and > 0");
  if (!std::isfinite(p.epsilon) || !(p.epsilon > 0) || !(p.epsilon < 1)) {
    fail("epsilon must lie in (0, 1)");
  }
  if (!(p.L * p.r <= 0.5)) fail("L * r must be <= 1/2");
  if (p.n < 2) fail("n must be >= 2");
  if (const auto* lc = std::get_if<LogNC>(&p.c_policy)) {
    if (!std::isfinite(lc->c0) || !(lc->c0 > 0)) {
      fail("C0 must be finite and > 0");
    }
  }
  const double c = effective_c(p.c_policy, p.n);
  if (!std::isfinite(c) || !(c > 1)) fail("C must be finite and > 1");

  MechanismConfig cfg;
  cfg.params_ = p;
  cfg.c_ = c;
  const double ln = p.L * static_cast<double>(p.n);
  cfg.support_bound_ = p.R + 4 * c * p.r;
  cfg.bucket_count_ = static_cast<int>(std::floor(ln * p.r / (2 * c)));
  cfg.slope_ = ln / (6 * c);
  cfg.bucket_width_ = c / ln;
  cfg.center_radius_ = 3 * c * p.r;
  cfg.flat_drop_ = ln * p.r / 2;
  cfg.laplace_scale_ = 12 * c / (ln * p.epsilon);
  return cfg;
}

// Returns a validated copy of params with n replaced.
inline MechanismConfig with_n(MechanismParams params, std::size_t n) {
  params.n = n;
  return validate_config(params);
}

// A finite dataset of at least two values with a cached sorted view.
class Dataset {
 public:
  explicit Dataset(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw Error(ErrorCode::kDatasetTooSmall, "dataset needs n >= 2");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw Error(ErrorCode::kInvalidData,
                    "non-finite value at index " + std::to_string(i));
      }
    }
    permutation_.resize(values_.size());
    std::iota(permutation_.begin(), permutation_.end(), std::size_t{0});
    std::stable_sort(permutation_.begin(), permutation_.end(),
                     [this](std::size_t a, std::size_t b) {
                       return values_[a] < values_[b];
                     });
    sorted_.reserve(values_.size());
    for (std::size_t i : permutation_) sorted_.push_back(values_[i]);
  }

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& sorted() const noexcept { return sorted_; }
  // sorted()[j] == values()[permutation()[j]].
  const std::vector<std::size_t>& permutation() const noexcept {
    return permutation_;
  }

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
  std::vector<std::size_t> permutation_;
};

// x_(floor(n/2)), 1-based, of the sorted sample.
inline double left_median(const Dataset& x) {
  return x.sorted()[x.size() / 2 - 1];
}

inline double left_median(std::span<const double> values) {
  if (values.size() < 2) {
    throw Error(ErrorCode::kDatasetTooSmall, "dataset needs n >= 2");
  }
  std::vector<double> copy(values.begin(), values.end());
  auto mid = copy.begin() + static_cast<std::ptrdiff_t>(copy.size() / 2 - 1);
  std::nth_element(copy.begin(), mid, copy.end());
  return *mid;
}

inline void check_length(const Dataset& x, const MechanismConfig& cfg) {
  if (x.size() != cfg.n()) {
    throw Error(ErrorCode::kLengthMismatch,
                "dataset has " + std::to_string(x.size()) +
                    " values, config expects " + std::to_string(cfg.n()));
  }
}

}  // namespace dpmedian

#endif  // DPMEDIAN_CORE_HPP_
