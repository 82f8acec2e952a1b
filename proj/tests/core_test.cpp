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

#include "dpmedian/core.hpp"
#include "oracles.hpp"

namespace dpmedian {
namespace {

MechanismParams base(std::size_t n) {
  MechanismParams p;
  p.L = 0.5;
  p.r = 1;
  p.R = 10;
  p.epsilon = 0.5;
  p.c_policy = ConstantC{6};
  p.n = n;
  return p;
}

void expect_violation(const MechanismParams& p) {
  try {
    validate_config(p);
    FAIL() << "expected ParameterViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParameterViolation);
  }
}

TEST(ConfigTest, DerivedConstantsN1000) {
  const MechanismConfig cfg = validate_config(base(1000));
  EXPECT_DOUBLE_EQ(cfg.support_bound(), 34.0);
  EXPECT_EQ(cfg.bucket_count(), 41);
  EXPECT_DOUBLE_EQ(cfg.bucket_width(), 6.0 / 500.0);
  EXPECT_DOUBLE_EQ(cfg.slope(), 500.0 / 36.0);
  EXPECT_DOUBLE_EQ(cfg.median_lo(), -10.5);
  EXPECT_DOUBLE_EQ(cfg.median_hi(), 10.5);
  EXPECT_DOUBLE_EQ(cfg.center_radius(), 18.0);
  EXPECT_DOUBLE_EQ(cfg.laplace_scale(), 72.0 / 250.0);
  EXPECT_EQ(cfg.median_rank(), 500u);
}

TEST(ConfigTest, BucketCountVanishesForSmallN) {
  EXPECT_EQ(validate_config(base(20)).bucket_count(), 0);
  EXPECT_EQ(validate_config(base(24)).bucket_count(), 1);
}

TEST(ConfigTest, RejectsInvalidParameters) {
  auto p = base(100);
  p.L = 0.6;
  expect_violation(p);  // L r > 1/2
  p = base(100);
  p.epsilon = 1.0;
  expect_violation(p);
  p = base(100);
  p.epsilon = 0;
  expect_violation(p);
  p = base(100);
  p.c_policy = ConstantC{1.0};
  expect_violation(p);
  p = base(100);
  p.R = std::nan("");
  expect_violation(p);
  p = base(100);
  p.r = -1;
  expect_violation(p);
  p = base(1);
  expect_violation(p);
  p = base(100);
  p.c_policy = LogNC{-1};
  expect_violation(p);
}

TEST(ConfigTest, LogNFloorMatchesBisection) {
  EXPECT_NEAR(kLogNMinimumC, oracle::log_n_floor(), 1e-9);
  const double g = 4 * kLogNMinimumC * std::exp(1.0) *
                   std::exp(-2 * kLogNMinimumC / 27);
  EXPECT_NEAR(g, 0.5, 1e-12);
  EXPECT_LT(4 * 104.32 * std::exp(1.0) * std::exp(-2 * 104.32 / 27), 0.5);
}

TEST(ConfigTest, LogNPolicy) {
  EXPECT_DOUBLE_EQ(effective_c(LogNC{1}, 1000), kLogNMinimumC);
  const double big = effective_c(LogNC{50}, 1000);
  EXPECT_DOUBLE_EQ(big, 50 * std::log(1000.0));
  auto p = base(1000);
  p.c_policy = LogNC{1};
  EXPECT_DOUBLE_EQ(validate_config(p).C(), kLogNMinimumC);
}

TEST(DatasetTest, RejectsBadInput) {
  try {
    Dataset x({1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDatasetTooSmall);
  }
  try {
    Dataset x({1.0, INFINITY});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidData);
  }
}

TEST(DatasetTest, SortedViewAndPermutation) {
  const Dataset x({3.0, -1.0, 2.0, -1.0});
  EXPECT_EQ(x.sorted(), (std::vector<double>{-1, -1, 2, 3}));
  for (std::size_t j = 0; j < x.size(); ++j) {
    EXPECT_EQ(x.sorted()[j], x.values()[x.permutation()[j]]);
  }
}

TEST(MedianTest, LeftMedian) {
  EXPECT_EQ(left_median(Dataset({4.0, 1.0, 3.0, 2.0})), 2.0);
  EXPECT_EQ(left_median(Dataset({5.0, 1.0, 3.0})), 1.0);
  EXPECT_EQ(left_median(Dataset({0.0, 1.0})), 0.0);
  const std::vector<double> v{9, 7, 8, 1, 2};
  EXPECT_EQ(left_median(std::span<const double>(v)), 2.0);
}

TEST(MedianTest, LengthMismatch) {
  const MechanismConfig cfg = validate_config(base(3));
  try {
    check_length(Dataset({1.0, 2.0}), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

}  // namespace
}  // namespace dpmedian
