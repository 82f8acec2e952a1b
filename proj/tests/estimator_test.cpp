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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dpmedian/estimator.hpp"

namespace dpmedian {
namespace {

MechanismConfig cfg_for(std::size_t n, CPolicy policy = ConstantC{2}) {
  MechanismParams p;
  p.L = 0.5;
  p.r = 1;
  p.R = 10;
  p.epsilon = 0.5;
  p.c_policy = policy;
  p.n = n;
  return validate_config(p);
}

TEST(PrivateMedianTest, BranchFollowsMembership) {
  const auto cfg = cfg_for(8);
  RandomSource rng(1);
  const Dataset h({0, 0, 0, 0, 0, 0, 1, 2});
  const Dataset g({0, 1, 2, 3, 4, 5, 6, 7});
  for (int i = 0; i < 200; ++i) {
    const auto a = private_median(h, cfg, rng);
    EXPECT_EQ(a.branch, Branch::kRestricted);
    EXPECT_LE(std::abs(a.estimate), cfg.support_bound());
    const auto b = private_median(g, cfg, rng);
    EXPECT_EQ(b.branch, Branch::kGeneral);
    EXPECT_LE(std::abs(b.estimate), cfg.support_bound());
    EXPECT_EQ(b.n, 8u);
    EXPECT_GE(b.elapsed_seconds, 0);
  }
}

TEST(PrivateMedianTest, DeterministicGivenSeed) {
  const auto cfg = cfg_for(8);
  const Dataset g({0, 1, 2, 3, 4, 5, 6, 7});
  RandomSource a(42);
  RandomSource b(42);
  for (int i = 0; i < 20; ++i) {
    const auto ra = private_median(g, cfg, a);
    const auto rb = private_median(g, cfg, b);
    EXPECT_EQ(ra.estimate, rb.estimate);
    EXPECT_EQ(ra.seed, 42u);
  }
}

TEST(PrivateMedianTest, LengthMismatch) {
  const auto cfg = cfg_for(9);
  RandomSource rng(1);
  try {
    private_median(Dataset({1, 2, 3}), cfg, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(EffectiveCTest, Policies) {
  EXPECT_EQ(effective_c(ConstantC{6}, 10), 6);
  EXPECT_EQ(effective_c(ConstantC{6}, 1000000), 6);
  EXPECT_EQ(effective_c(LogNC{2}, 20), kLogNMinimumC);
  EXPECT_EQ(cfg_for(20, LogNC{2}).C(), kLogNMinimumC);
  EXPECT_EQ(cfg_for(20, LogNC{2}).bucket_count(), 0);
}

}  // namespace
}  // namespace dpmedian
