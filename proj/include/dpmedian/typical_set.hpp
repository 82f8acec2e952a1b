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

#ifndef DPMEDIAN_TYPICAL_SET_HPP_
#define DPMEDIAN_TYPICAL_SET_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dpmedian/core.hpp"

namespace dpmedian {

// Bucket membership. Both tests use the same floating-point expressions as
// the anchor points so that the profile partition is exact.
inline bool in_right_bucket(double x, double xi, double offset) {
  return xi <= x && x - offset <= xi;
}

inline bool in_left_bucket(double x, double xi, double offset) {
  return x <= xi && xi <= x + offset;
}

namespace detail {

// Changes needed to make xi the left median, given #{x < xi} and #{x <= xi}.
inline int median_moves(std::size_t lt, std::size_t le, std::size_t rank) {
  if (le < rank) return static_cast<int>(rank - le);
  if (lt >= rank) return static_cast<int>(lt - rank + 1);
  return 0;
}

inline bool in_median_range(double xi, const MechanismConfig& cfg) {
  return cfg.median_lo() <= xi && xi <= cfg.median_hi();
}

}  // namespace detail

// X in H: median in range and every bucket kappa = 1..K holds kappa+1 points.
inline bool is_typical(const Dataset& x, const MechanismConfig& cfg) {
  check_length(x, cfg);
  const double m = left_median(x);
  if (!detail::in_median_range(m, cfg)) return false;
  const auto& s = x.sorted();
  const auto lt = static_cast<std::size_t>(
      std::lower_bound(s.begin(), s.end(), m) - s.begin());
  const auto le = static_cast<std::size_t>(
      std::upper_bound(s.begin(), s.end(), m) - s.begin());
  for (int kappa = 1; kappa <= cfg.bucket_count(); ++kappa) {
    const double off = cfg.bucket_offset(kappa);
    const auto rle = static_cast<std::size_t>(
        std::partition_point(s.begin(), s.end(),
                             [&](double v) { return v - off <= m; }) -
        s.begin());
    const auto llt = static_cast<std::size_t>(
        std::partition_point(s.begin(), s.end(),
                             [&](double v) { return v + off < m; }) -
        s.begin());
    const auto need = static_cast<std::size_t>(kappa) + 1;
    if (rle - lt < need || le - llt < need) return false;
  }
  return true;
}

// Minimum number of replacements that turn X into a member of H with left
// median xi. Empty when xi lies outside the median range.
inline std::optional<int> typical_hamming(const Dataset& x, double xi,
                                          const MechanismConfig& cfg) {
  check_length(x, cfg);
  if (!std::isfinite(xi)) {
    throw Error(ErrorCode::kInvalidData, "xi must be finite");
  }
  if (!detail::in_median_range(xi, cfg)) return std::nullopt;
  const auto& s = x.sorted();
  const auto lt = static_cast<std::size_t>(
      std::lower_bound(s.begin(), s.end(), xi) - s.begin());
  const auto le = static_cast<std::size_t>(
      std::upper_bound(s.begin(), s.end(), xi) - s.begin());
  int best = detail::median_moves(lt, le, cfg.median_rank());
  for (int kappa = 1; kappa <= cfg.bucket_count(); ++kappa) {
    const double off = cfg.bucket_offset(kappa);
    const auto rle = static_cast<std::size_t>(
        std::partition_point(s.begin(), s.end(),
                             [&](double v) { return v - off <= xi; }) -
        s.begin());
    const auto llt = static_cast<std::size_t>(
        std::partition_point(s.begin(), s.end(),
                             [&](double v) { return v + off < xi; }) -
        s.begin());
    const auto have = static_cast<int>(std::min(rle - lt, le - llt));
    best = std::max(best, kappa + 1 - have);
  }
  return best;
}

struct Projection {
  int distance = 0;
  std::vector<double> witness;
};

// Literal two-part greedy. Part 1 repeatedly moves the extreme point on the
// far side of xi onto xi until xi is the left median. Part 2 fills buckets
// from kappa = K down to 1, taking the current maximum for the right bucket
// and the current minimum for the left one. Ties go to the lowest index.
inline std::optional<Projection> greedy_projection(
    const Dataset& x, double xi, const MechanismConfig& cfg) {
  check_length(x, cfg);
  if (!std::isfinite(xi)) {
    throw Error(ErrorCode::kInvalidData, "xi must be finite");
  }
  if (!detail::in_median_range(xi, cfg)) return std::nullopt;
  std::vector<double> y = x.values();
  const std::size_t n = y.size();

  auto argmax = [&] {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (y[i] > y[best]) best = i;
    }
    return best;
  };
  auto argmin = [&] {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (y[i] < y[best]) best = i;
    }
    return best;
  };
  auto replace = [&](std::size_t i) {
    if (y[i] == xi) throw std::logic_error("greedy projection stalled");
    y[i] = xi;
  };
  auto count = [&](double off, bool right) {
    int c = 0;
    for (double v : y) {
      if (right ? in_right_bucket(v, xi, off) : in_left_bucket(v, xi, off)) {
        ++c;
      }
    }
    return c;
  };

  for (double m = left_median(y); m != xi; m = left_median(y)) {
    replace(xi < m ? argmax() : argmin());
  }
  for (int kappa = cfg.bucket_count(); kappa >= 1; --kappa) {
    const double off = cfg.bucket_offset(kappa);
    while (count(off, true) < kappa + 1) replace(argmax());
    while (count(off, false) < kappa + 1) replace(argmin());
  }

  Projection out;
  out.witness = std::move(y);
  for (std::size_t i = 0; i < n; ++i) {
    if (out.witness[i] != x.values()[i]) ++out.distance;
  }
  return out;
}

// Sorted, deduplicated breakpoints of the Hamming profile: X_i +- kappa w for
// kappa = 0..K inside the median range, plus the range endpoints.
inline std::vector<double> anchor_points(std::span<const double> values,
                                         const MechanismConfig& cfg) {
  const double lo = cfg.median_lo();
  const double hi = cfg.median_hi();
  std::vector<double> pts;
  pts.reserve(values.size() * (2 * static_cast<std::size_t>(
                                       cfg.bucket_count()) + 1) + 2);
  pts.push_back(lo);
  pts.push_back(hi);
  auto add = [&](double p) {
    if (lo <= p && p <= hi) pts.push_back(p);
  };
  for (double v : values) {
    add(v);
    for (int kappa = 1; kappa <= cfg.bucket_count(); ++kappa) {
      const double off = cfg.bucket_offset(kappa);
      add(v - off);
      add(v + off);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

inline std::vector<double> anchor_points(const Dataset& x,
                                         const MechanismConfig& cfg) {
  return anchor_points(std::span<const double>(x.values()), cfg);
}

// Piecewise-constant typical Hamming distance over the median range. Piece
// 2j is the singleton {points[j]}; piece 2j+1 is the open interval
// (points[j], points[j+1]).
class HammingProfile {
 public:
  HammingProfile(std::vector<double> points, std::vector<int> values)
      : points_(std::move(points)), values_(std::move(values)) {
    if (points_.empty() || values_.size() != 2 * points_.size() - 1) {
      throw std::invalid_argument("malformed Hamming profile");
    }
  }

  const std::vector<double>& points() const noexcept { return points_; }
  const std::vector<int>& piece_values() const noexcept { return values_; }
  double lo() const noexcept { return points_.front(); }
  double hi() const noexcept { return points_.back(); }

  std::optional<int> value_at(double xi) const {
    if (!(lo() <= xi && xi <= hi())) return std::nullopt;
    const auto it = std::lower_bound(points_.begin(), points_.end(), xi);
    const auto j = static_cast<std::size_t>(it - points_.begin());
    if (*it == xi) return values_[2 * j];
    return values_[2 * j - 1];
  }

  // Number of adjacent pieces whose values differ.
  std::size_t change_count() const {
    std::size_t c = 0;
    for (std::size_t i = 1; i < values_.size(); ++i) {
      if (values_[i] != values_[i - 1]) ++c;
    }
    return c;
  }

  int min_value() const {
    return *std::min_element(values_.begin(), values_.end());
  }

 private:
  std::vector<double> points_;
  std::vector<int> values_;
};

// Sweeps the anchors left to right with one monotone pointer set per bucket.
inline HammingProfile hamming_profile(const Dataset& x,
                                      const MechanismConfig& cfg) {
  check_length(x, cfg);
  std::vector<double> pts = anchor_points(x, cfg);
  const auto& s = x.sorted();
  const std::size_t n = s.size();
  const int big_k = cfg.bucket_count();
  const std::size_t rank = cfg.median_rank();
  const std::size_t m = pts.size();

  std::vector<double> offs(static_cast<std::size_t>(big_k) + 1);
  for (int k = 1; k <= big_k; ++k) offs[k] = cfg.bucket_offset(k);
  // #{x - off <= P}, #{x + off < P}, #{x + off <= P}.
  std::vector<std::size_t> r_le(offs.size(), 0);
  std::vector<std::size_t> l_lt(offs.size(), 0);
  std::vector<std::size_t> l_le(offs.size(), 0);
  std::size_t lt = 0;
  std::size_t le = 0;

  std::vector<int> values(2 * m - 1);
  for (std::size_t j = 0; j < m; ++j) {
    const double p = pts[j];
    while (lt < n && s[lt] < p) ++lt;
    while (le < n && s[le] <= p) ++le;
    int at = detail::median_moves(lt, le, rank);
    int after = detail::median_moves(le, le, rank);
    for (int k = 1; k <= big_k; ++k) {
      const double off = offs[k];
      std::size_t& a = r_le[k];
      std::size_t& b = l_lt[k];
      std::size_t& c = l_le[k];
      while (a < n && s[a] - off <= p) ++a;
      while (b < n && s[b] + off < p) ++b;
      while (c < n && s[c] + off <= p) ++c;
      const auto have_at = static_cast<int>(std::min(a - lt, le - b));
      const auto have_after = static_cast<int>(std::min(a - le, le - c));
      at = std::max(at, k + 1 - have_at);
      after = std::max(after, k + 1 - have_after);
    }
    values[2 * j] = at;
    if (j + 1 < m) values[2 * j + 1] = after;
  }
  return HammingProfile(std::move(pts), std::move(values));
}

// Extent of the level set {xi : TH(X, xi) = k}.
struct LevelSet {
  int k = 0;
  double inf = 0;
  double sup = 0;
};

// Nonempty level sets in increasing k.
inline std::vector<LevelSet> level_sets(const HammingProfile& profile) {
  const auto& pts = profile.points();
  const auto& vals = profile.piece_values();
  std::vector<LevelSet> out;
  std::vector<int> slot;
  auto touch = [&](int k, double lo, double hi) {
    if (static_cast<std::size_t>(k) >= slot.size()) {
      slot.resize(static_cast<std::size_t>(k) + 1, -1);
    }
    int& idx = slot[static_cast<std::size_t>(k)];
    if (idx < 0) {
      idx = static_cast<int>(out.size());
      out.push_back({k, lo, hi});
      return;
    }
    LevelSet& ls = out[static_cast<std::size_t>(idx)];
    ls.inf = std::min(ls.inf, lo);
    ls.sup = std::max(ls.sup, hi);
  };
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const std::size_t j = i / 2;
    if (i % 2 == 0) {
      touch(vals[i], pts[j], pts[j]);
    } else {
      touch(vals[i], pts[j], pts[j + 1]);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LevelSet& a, const LevelSet& b) { return a.k < b.k; });
  return out;
}

inline std::vector<LevelSet> level_sets(const Dataset& x,
                                        const MechanismConfig& cfg) {
  return level_sets(hamming_profile(x, cfg));
}

}  // namespace dpmedian

#endif  // DPMEDIAN_TYPICAL_SET_HPP_
