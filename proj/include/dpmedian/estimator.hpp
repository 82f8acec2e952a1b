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

#ifndef DPMEDIAN_ESTIMATOR_HPP_
#define DPMEDIAN_ESTIMATOR_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>

#include "dpmedian/core.hpp"
#include "dpmedian/envelope.hpp"
#include "dpmedian/samplers.hpp"
#include "dpmedian/typical_set.hpp"

namespace dpmedian {

enum class Branch { kRestricted, kGeneral };

inline const char* to_string(Branch b) {
  return b == Branch::kRestricted ? "restricted" : "general";
}

struct EstimateReport {
  double estimate = 0;
  Branch branch = Branch::kRestricted;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  double elapsed_seconds = 0;
};

// epsilon-DP median. Typical data takes the closed-form restricted sampler;
// anything else samples the extended density.
inline EstimateReport private_median(const Dataset& x,
                                     const MechanismConfig& cfg,
                                     RandomSource& rng) {
  check_length(x, cfg);
  const auto start = std::chrono::steady_clock::now();
  EstimateReport rep;
  rep.seed = rng.seed();
  rep.n = x.size();
  if (is_typical(x, cfg)) {
    rep.branch = Branch::kRestricted;
    rep.estimate = sample_restricted(left_median(x), cfg, rng);
  } else {
    rep.branch = Branch::kGeneral;
    rep.estimate = sample_piecewise(build_envelope(x, cfg), rng);
  }
  rep.elapsed_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return rep;
}

}  // namespace dpmedian

#endif  // DPMEDIAN_ESTIMATOR_HPP_
