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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "dpmedian/lab.hpp"

namespace dpmedian {
namespace {

MechanismParams params(double c = 2) {
  MechanismParams p;
  p.L = 0.5;
  p.r = 1;
  p.R = 10;
  p.epsilon = 0.5;
  p.c_policy = ConstantC{c};
  return p;
}

TEST(ZooTest, UniformSlab) {
  const auto d = AdmissibleDistribution::uniform_slab(0, 1, 2);
  EXPECT_EQ(d.true_median(), 0);
  EXPECT_EQ(d.certificate().L, 0.5);
  RandomSource rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double x = d.sample(rng);
    EXPECT_GE(x, -1);
    EXPECT_LE(x, 1);
  }
  EXPECT_THROW(AdmissibleDistribution::uniform_slab(3, 1, 2), Error);
}

TEST(ZooTest, TailMixtureAtoms) {
  const double big_l = 0.2;
  const double r = 1;
  const double big_r = 3;
  const auto d = AdmissibleDistribution::tail_mixture(0.5, big_l, r, big_r);
  RandomSource rng(2);
  const int n = 100000;
  int lo = 0;
  int hi = 0;
  int mid = 0;
  for (int i = 0; i < n; ++i) {
    const double x = d.sample(rng);
    lo += x == -2 * (big_r + r);
    hi += x == 2 * (big_r + r);
    mid += x >= -0.5 && x <= 1.5;
  }
  const double p = 0.5 - big_l * r;
  const double sd = std::sqrt(p * (1 - p) / n);
  EXPECT_NEAR(lo / double(n), p, 3 * sd);
  EXPECT_NEAR(hi / double(n), p, 3 * sd);
  EXPECT_EQ(lo + hi + mid, n);
  EXPECT_EQ(d.true_median(), 0.5);
}

TEST(ZooTest, BernoulliEmbeddedMedian) {
  const double big_l = 0.3;
  const double r = 1;
  for (double p : {0.3, 0.5, 0.7}) {
    const auto d = AdmissibleDistribution::bernoulli_embedded(p, big_l, r, 5);
    const double want = p * (1 / big_l - 2 * r) + r - 1 / (2 * big_l);
    EXPECT_NEAR(d.true_median(), want, 1e-15);
    RandomSource rng(3);
    std::vector<double> v(200001);
    for (auto& x : v) x = d.sample(rng);
    std::nth_element(v.begin(), v.begin() + 100000, v.end());
    EXPECT_NEAR(v[100000], want, 0.02);
    // The certified window stays inside [-r, r].
    EXPECT_LE(std::abs(d.true_median()) + d.certificate().r, r + 1e-15);
  }
  EXPECT_THROW(AdmissibleDistribution::bernoulli_embedded(0, 0.2, 1, 5), Error);
}

TEST(ZooTest, GaussianCertificate) {
  const auto d = AdmissibleDistribution::gaussian(0.5, 2, 1, 3);
  const double want =
      std::exp(-0.125) / (2 * std::sqrt(2 * std::numbers::pi));
  EXPECT_NEAR(d.certificate().L, want, 1e-15);
  RandomSource rng(4);
  double sum = 0;
  double sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = d.sample(rng);
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.02);
  EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 4, 0.05);
}

TEST(BruteForceTest, Examples) {
  const auto cfg = with_n(params(), 8);
  const Dataset h({0, 0, 0, 0, 0, 0, 1, 2});
  EXPECT_EQ(brute_force_typical_hamming(h, 0, cfg), 0);
  EXPECT_EQ(brute_force_typical_hamming(h, 11, cfg), std::nullopt);
  const Dataset g({0, 1, 2, 3, 4, 5, 6, 7});
  EXPECT_EQ(brute_force_typical_hamming(g, 3, cfg), 1);
}

TEST(QuadratureTest, ConstantDensity) {
  const auto cdf = quadrature_cdf([](double) { return 1.0; }, 0, 1, 1000);
  for (double x : {0.0, 0.1, 0.33, 0.5, 0.999, 1.0}) {
    EXPECT_NEAR(cdf(x), x, 1e-9);
  }
  EXPECT_THROW(quadrature_cdf([](double) { return 1.0; }, 0, 1, 999), Error);
}

TEST(QuadratureTest, RestrictedIntegratesToOne) {
  const auto cfg = with_n(params(), 8);
  const double b = cfg.support_bound();
  const double lz = restricted_log_normalizer(cfg);
  const auto cdf = quadrature_cdf(
      [&](double w) { return std::exp(restricted_log_density(0, w, cfg)); },
      -b, b, 100000);
  EXPECT_NEAR(cdf.total(), std::exp(lz), 1e-6);
}

TEST(AuditTest, IdenticalPair) {
  const auto cfg = with_n(params(), 8);
  std::vector<std::pair<Dataset, Dataset>> pairs;
  pairs.emplace_back(Dataset({0, 1, 2, 3, 4, 5, 6, 7}),
                     Dataset({0, 1, 2, 3, 4, 5, 6, 7}));
  const auto rep = audit_privacy(pairs, cfg, 1001);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.max_mechanism_excess, 1e-12);
  EXPECT_LE(rep.max_envelope_excess, 1e-12);
}

TEST(AuditTest, TypicalNeighboursAndFarPair) {
  const std::size_t n = 32;
  const auto cfg = with_n(params(), n);
  const auto slab = AdmissibleDistribution::uniform_slab(0, 1, 10);
  RandomSource rng(9);
  Dataset x = sample_admissible(slab, n, rng);
  while (!is_typical(x, cfg)) x = sample_admissible(slab, n, rng);
  std::vector<std::pair<Dataset, Dataset>> pairs;
  for (int t = 0; t < 20 && pairs.size() < 5; ++t) {
    std::vector<double> y = x.values();
    y[rng.next_u64() % n] = slab.sample(rng);
    Dataset yy(y);
    if (is_typical(yy, cfg)) pairs.emplace_back(x, std::move(yy));
  }
  ASSERT_FALSE(pairs.empty());
  std::vector<double> far = x.values();
  for (std::size_t i = 0; i < n / 2; ++i) far[i] = 40.0 + i;
  pairs.emplace_back(x, Dataset(far));
  const auto rep = audit_privacy(pairs, cfg, 2001);
  EXPECT_TRUE(rep.pass);
  EXPECT_FALSE(rep.pairs.back().both_typical);
  EXPECT_EQ(rep.pairs.back().distance, n / 2);
  for (const auto& p : rep.pairs) {
    EXPECT_LE(p.mechanism_excess, 1e-9);
    EXPECT_LE(p.envelope_excess, 1e-9);
  }
}

TEST(ExperimentTest, HugeAlphaNeverFails) {
  const auto slab = AdmissibleDistribution::uniform_slab(0, 1, 2);
  auto p = params(6);
  p.R = 2;
  const std::vector<std::size_t> ns{64};
  const auto cfg = with_n(p, 64);
  const auto rows = run_accuracy_experiment(slab, p, ns, 100,
                                            2 * cfg.support_bound() + 1, 1);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].failures, 0u);
  EXPECT_EQ(rows[0].rate, 0);
}

TEST(ExperimentTest, DeterministicAndConvergent) {
  const auto slab = AdmissibleDistribution::uniform_slab(0, 1, 2);
  auto p = params(6);
  p.R = 2;
  const std::vector<std::size_t> ns{128};
  const auto a = run_accuracy_experiment(slab, p, ns, 10000, 0.5, 1);
  const auto b = run_accuracy_experiment(slab, p, ns, 10000, 0.5, 2);
  const auto c = run_accuracy_experiment(slab, p, ns, 10000, 0.5, 1, 1);
  EXPECT_NEAR(a[0].rate, b[0].rate, 0.02);
  EXPECT_EQ(a[0].failures, c[0].failures);
  EXPECT_THROW(run_accuracy_experiment(slab, p, ns, 99, 0.5, 1), Error);
}

TEST(FastPathTest, FractionsAreInRange) {
  const auto slab = AdmissibleDistribution::uniform_slab(0, 1, 2);
  auto p = params(6);
  p.R = 2;
  const std::vector<std::size_t> ns{32, 256};
  const auto rows = run_fast_path_experiment(slab, p, ns, 50, 3);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_GE(r.fraction, 0);
    EXPECT_LE(r.fraction, 1);
    EXPECT_EQ(r.datasets, 50u);
  }
}

TEST(KsTest, TwoSampleIdenticalIsZero) {
  const std::vector<double> a{1, 2, 3, 3, 4};
  EXPECT_EQ(ks_two_sample(a, a), 0);
  EXPECT_EQ(ks_two_sample({0, 1}, {2, 3}), 1);
}

}  // namespace
}  // namespace dpmedian
