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

#ifndef DPMEDIAN_ENVELOPE_HPP_
#define DPMEDIAN_ENVELOPE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpmedian/core.hpp"
#include "dpmedian/typical_set.hpp"

namespace dpmedian {

// (epsilon/4) * min((L n / 3C) d, L r n).
inline double penalty(double d, const MechanismConfig& cfg) {
  return cfg.epsilon() / 2 * std::min(cfg.slope() * d, cfg.flat_drop());
}

// Unnormalized log density of the restricted mechanism around median m.
inline double restricted_log_density(double m, double omega,
                                     const MechanismConfig& cfg) {
  const double b = cfg.support_bound();
  if (!(-b <= omega && omega <= b)) {
    throw Error(ErrorCode::kOutOfSupport, "omega outside [-B, B]");
  }
  return -penalty(std::abs(m - omega), cfg);
}

// Log of the restricted normalizer. Does not depend on the median.
inline double restricted_log_normalizer(const MechanismConfig& cfg) {
  const double sigma = cfg.laplace_scale();
  const double q = cfg.epsilon() * cfg.flat_drop() / 2;
  const double center = 2 * sigma * -std::expm1(-q);
  const double outer =
      (2 * cfg.support_bound() - 2 * cfg.center_radius()) * std::exp(-q);
  return std::log(center + outer);
}

// Affine function slope * x + intercept on [lo, hi].
struct LinearPiece {
  double lo = 0;
  double hi = 0;
  double slope = 0;
  double intercept = 0;

  double at(double x) const { return slope * x + intercept; }
};

// h_k(omega) = k - s * min(max(|omega - a|, |omega - b|), 3Cr) for the level
// set of value k with extent [a, b].
struct HFunction {
  int k = 0;
  double a = 0;
  double b = 0;

  double value(double omega, const MechanismConfig& cfg) const {
    const double far = std::max(std::abs(omega - a), std::abs(omega - b));
    return k - std::min(cfg.slope() * far, cfg.flat_drop());
  }

  // Pieces covering [-B, B] with no zero-width pieces.
  std::vector<LinearPiece> pieces(const MechanismConfig& cfg) const {
    const double big_b = cfg.support_bound();
    const double s = cfg.slope();
    const double floor_value = k - cfg.flat_drop();
    const double rad = cfg.center_radius();
    std::vector<LinearPiece> out;
    if (b - a >= 2 * rad) {
      out.push_back({-big_b, big_b, 0, floor_value});
      return out;
    }
    const double p1 = std::clamp(b - rad, -big_b, big_b);
    const double p2 = std::clamp((a + b) / 2, -big_b, big_b);
    const double p3 = std::clamp(a + rad, -big_b, big_b);
    const LinearPiece all[] = {
        {-big_b, p1, 0, floor_value},
        {p1, p2, s, k - s * b},
        {p2, p3, -s, k + s * a},
        {p3, big_b, 0, floor_value},
    };
    for (const auto& pc : all) {
      if (pc.hi > pc.lo) out.push_back(pc);
    }
    return out;
  }
};

namespace detail {

inline void append_piece(std::vector<LinearPiece>& out, LinearPiece pc) {
  if (!(pc.hi > pc.lo)) return;
  if (!out.empty()) {
    LinearPiece& last = out.back();
    if (last.slope == pc.slope && last.intercept == pc.intercept &&
        last.hi == pc.lo) {
      last.hi = pc.hi;
      return;
    }
  }
  out.push_back(pc);
}

// Pointwise minimum of two piecewise-linear functions on the same interval.
inline std::vector<LinearPiece> merge_min(const std::vector<LinearPiece>& f,
                                          const std::vector<LinearPiece>& g) {
  std::vector<LinearPiece> out;
  out.reserve(f.size() + g.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double x = f.front().lo;
  while (i < f.size() && j < g.size()) {
    const LinearPiece& pf = f[i];
    const LinearPiece& pg = g[j];
    const double x1 = std::min(pf.hi, pg.hi);
    if (x1 > x) {
      const double d0 = pf.at(x) - pg.at(x);
      const double d1 = pf.at(x1) - pg.at(x1);
      if (d0 <= 0 && d1 <= 0) {
        append_piece(out, {x, x1, pf.slope, pf.intercept});
      } else if (d0 >= 0 && d1 >= 0) {
        append_piece(out, {x, x1, pg.slope, pg.intercept});
      } else {
        double xc = x + (x1 - x) * (d0 / (d0 - d1));
        xc = std::clamp(xc, x, x1);
        const LinearPiece& first = d0 < 0 ? pf : pg;
        const LinearPiece& second = d0 < 0 ? pg : pf;
        append_piece(out, {x, xc, first.slope, first.intercept});
        append_piece(out, {xc, x1, second.slope, second.intercept});
      }
      x = x1;
    }
    if (pf.hi == x1) ++i;
    if (pg.hi == x1) ++j;
  }
  return out;
}

}  // namespace detail

// Lower envelope of a family of piecewise-linear functions on a common domain.
inline std::vector<LinearPiece> lower_envelope(
    std::vector<std::vector<LinearPiece>> fns) {
  if (fns.empty()) {
    throw Error(ErrorCode::kDegenerateDensity, "empty function family");
  }
  while (fns.size() > 1) {
    std::vector<std::vector<LinearPiece>> next;
    next.reserve((fns.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < fns.size(); i += 2) {
      next.push_back(detail::merge_min(fns[i], fns[i + 1]));
    }
    if (fns.size() % 2 == 1) next.push_back(std::move(fns.back()));
    fns = std::move(next);
  }
  return std::move(fns.front());
}

// Log of the integral of exp(alpha * x + beta) over [lo, hi].
inline double segment_log_mass(double alpha, double beta, double lo,
                               double hi) {
  const double width = hi - lo;
  if (!(width > 0)) return -std::numeric_limits<double>::infinity();
  if (alpha == 0) return beta + std::log(width);
  const double top = std::max(alpha * lo + beta, alpha * hi + beta);
  return top + std::log(-std::expm1(-std::abs(alpha) * width)) -
         std::log(std::abs(alpha));
}

inline double log_sum_exp(std::span<const double> xs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : xs) top = std::max(top, v);
  if (!std::isfinite(top)) return top;
  double acc = 0;
  for (double v : xs) acc += std::exp(v - top);
  return top + std::log(acc);
}

// exp(alpha * x + beta) on [lo, hi].
struct ExpSegment {
  double lo = 0;
  double hi = 0;
  double alpha = 0;
  double beta = 0;
  double log_mass = 0;
};

// Contiguous piecewise-exponential density with cached segment masses.
class PiecewiseExpDensity {
 public:
  explicit PiecewiseExpDensity(std::vector<ExpSegment> segments)
      : segments_(std::move(segments)) {
    if (segments_.empty()) {
      throw Error(ErrorCode::kDegenerateDensity, "no segments");
    }
    std::vector<double> masses;
    masses.reserve(segments_.size());
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      ExpSegment& sg = segments_[i];
      if (!(sg.hi > sg.lo) || !std::isfinite(sg.lo) || !std::isfinite(sg.hi)) {
        throw Error(ErrorCode::kEmptyInterval,
                    "segment " + std::to_string(i) + " is empty");
      }
      if (!std::isfinite(sg.alpha) || !std::isfinite(sg.beta)) {
        throw Error(ErrorCode::kDegenerateDensity,
                    "segment " + std::to_string(i) + " is not finite");
      }
      if (i > 0 && segments_[i - 1].hi != sg.lo) {
        throw Error(ErrorCode::kDegenerateDensity,
                    "segments are not contiguous at " + std::to_string(i));
      }
      sg.log_mass = segment_log_mass(sg.alpha, sg.beta, sg.lo, sg.hi);
      masses.push_back(sg.log_mass);
    }
    log_z_ = log_sum_exp(masses);
    if (!std::isfinite(log_z_)) {
      throw Error(ErrorCode::kDegenerateDensity, "normalizer not finite");
    }
    cumulative_.resize(segments_.size() + 1, 0.0);
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      cumulative_[i + 1] = cumulative_[i] + std::exp(masses[i] - log_z_);
    }
  }

  const std::vector<ExpSegment>& segments() const noexcept {
    return segments_;
  }
  double log_z() const noexcept { return log_z_; }
  double lo() const noexcept { return segments_.front().lo; }
  double hi() const noexcept { return segments_.back().hi; }

  std::size_t segment_index(double omega) const {
    if (!(lo() <= omega && omega <= hi())) {
      throw Error(ErrorCode::kOutOfSupport, "omega outside support");
    }
    auto it = std::upper_bound(
        segments_.begin(), segments_.end(), omega,
        [](double v, const ExpSegment& sg) { return v < sg.hi; });
    if (it == segments_.end()) --it;
    return static_cast<std::size_t>(it - segments_.begin());
  }

  double log_unnormalized(double omega) const {
    const ExpSegment& sg = segments_[segment_index(omega)];
    return sg.alpha * omega + sg.beta;
  }

  double log_pdf(double omega) const {
    return log_unnormalized(omega) - log_z_;
  }

  double cdf(double omega) const {
    if (omega <= lo()) return 0;
    if (omega >= hi()) return 1;
    const std::size_t i = segment_index(omega);
    const ExpSegment& sg = segments_[i];
    const double part =
        std::exp(segment_log_mass(sg.alpha, sg.beta, sg.lo, omega) - log_z_);
    return std::min(1.0, cumulative_[i] + part);
  }

 private:
  std::vector<ExpSegment> segments_;
  std::vector<double> cumulative_;
  double log_z_ = 0;
};

// Recomputes log Z from the segments.
inline double log_normalizer(const PiecewiseExpDensity& density) {
  std::vector<double> masses;
  masses.reserve(density.segments().size());
  for (const auto& sg : density.segments()) {
    masses.push_back(segment_log_mass(sg.alpha, sg.beta, sg.lo, sg.hi));
  }
  const double z = log_sum_exp(masses);
  if (!std::isfinite(z)) {
    throw Error(ErrorCode::kDegenerateDensity, "normalizer not finite");
  }
  return z;
}

inline std::vector<HFunction> h_functions(std::span<const LevelSet> levels) {
  std::vector<HFunction> out;
  out.reserve(levels.size());
  for (const auto& ls : levels) out.push_back({ls.k, ls.inf, ls.sup});
  return out;
}

// Exponent (epsilon/2) * min_k h_k as an explicit density.
inline PiecewiseExpDensity envelope_density(std::span<const HFunction> hs,
                                            const MechanismConfig& cfg) {
  std::vector<std::vector<LinearPiece>> fns;
  fns.reserve(hs.size());
  for (const auto& h : hs) fns.push_back(h.pieces(cfg));
  const std::vector<LinearPiece> env = lower_envelope(std::move(fns));
  const double half = cfg.epsilon() / 2;
  std::vector<ExpSegment> segs;
  segs.reserve(env.size());
  for (const auto& pc : env) {
    segs.push_back({pc.lo, pc.hi, half * pc.slope, half * pc.intercept, 0});
  }
  return PiecewiseExpDensity(std::move(segs));
}

inline PiecewiseExpDensity build_envelope(std::span<const LevelSet> levels,
                                          const MechanismConfig& cfg) {
  const std::vector<HFunction> hs = h_functions(levels);
  return envelope_density(hs, cfg);
}

inline PiecewiseExpDensity build_envelope(const Dataset& x,
                                          const MechanismConfig& cfg) {
  const std::vector<LevelSet> levels = level_sets(x, cfg);
  return build_envelope(levels, cfg);
}

// Restricted density around m in the same representation.
inline PiecewiseExpDensity restricted_density(double m,
                                              const MechanismConfig& cfg) {
  const HFunction h{0, m, m};
  return envelope_density(std::span<const HFunction>(&h, 1), cfg);
}

// exp((epsilon/2) min_k h_k(omega)) on [-B, B] and 0 outside.
inline double evaluate_unnormalized(const PiecewiseExpDensity& density,
                                    double omega) {
  if (!(density.lo() <= omega && omega <= density.hi())) return 0;
  return std::exp(density.log_unnormalized(omega));
}

inline double evaluate_unnormalized(const Dataset& x, double omega,
                                    const MechanismConfig& cfg) {
  return evaluate_unnormalized(build_envelope(x, cfg), omega);
}

}  // namespace dpmedian

#endif  // DPMEDIAN_ENVELOPE_HPP_
