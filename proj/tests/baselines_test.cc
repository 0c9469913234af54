// Copyright 2026 The fastkmpp Authors.
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

#include "fastkmpp/baselines.h"

#include <algorithm>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "test_util.h"

namespace fastkmpp {
namespace {

using testing::GaussianMixture;
using testing::UniformPoints;

TEST(KMeansPP, SingleCenterIsUniform) {
  const Dataset ds(UniformPoints(16, 2, 1));
  std::vector<double> counts(16, 0.0);
  for (int s = 0; s < 100000; ++s) counts[KMeansPPExact(ds, 1, s)[0]] += 1;
  EXPECT_GT(testing::ChiSquarePValue(counts, std::vector<double>(16, 1.0 / 16)), 0.001);
}

TEST(KMeansPP, OnlyPositiveMassIsChosen) {
  PointMatrix m(2, 1);
  m << 0, 10;
  const Dataset ds(m);
  D2Sampler sampler(ds);
  sampler.Add(0);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sampler.Draw(rng), 1);
}

TEST(KMeansPP, RangeChecks) {
  const Dataset ds(UniformPoints(5, 2, 1));
  EXPECT_THROW(KMeansPPExact(ds, 0, 1), InvalidArgument);
  EXPECT_THROW(KMeansPPExact(ds, 6, 1), InvalidArgument);
  EXPECT_THROW(UniformSampling(ds, 6, 1), InvalidArgument);
}

TEST(KMeansPP, ZeroResidualOpensLowestIndex) {
  PointMatrix m(4, 1);
  m << 2, 2, 7, 7;
  const std::vector<Index> c = KMeansPPExact(Dataset(m), 4, 9);
  EXPECT_EQ(std::set<Index>(c.begin(), c.end()).size(), 4u);
  // After both locations are taken the remaining duplicates come in index
  // order.
  std::vector<Index> rest(c.begin() + 2, c.end());
  EXPECT_TRUE(std::is_sorted(rest.begin(), rest.end()));
}

TEST(KMeansPP, MaintainedDistancesMatchBruteForce) {
  const Dataset ds(UniformPoints(500, 5, 4));
  D2Sampler sampler(ds);
  Rng rng(5);
  std::vector<Index> centers;
  for (int round = 0; round < 20; ++round) {
    const Index x = sampler.Draw(rng);
    sampler.Add(x);
    centers.push_back(x);
    const std::vector<double> naive = testing::NaiveNearestSq(ds.points(), centers);
    for (Index i = 0; i < ds.size(); ++i) {
      ASSERT_NEAR(sampler.nearest_sq()[i], naive[i], 1e-9 * std::max(1e-300, naive[i]));
    }
  }
}

TEST(KMeansPP, ConditionalDistributionsMatchEnumeration) {
  const Dataset ds(UniformPoints(12, 2, 6));
  const int trials = 100000;
  // Second center given a fixed first, third given a fixed pair.
  for (const std::vector<Index>& prefix :
       {std::vector<Index>{3}, std::vector<Index>{3, 8}}) {
    D2Sampler sampler(ds);
    for (Index s : prefix) sampler.Add(s);
    Rng rng(prefix.size());
    std::vector<double> counts(12, 0.0);
    for (int t = 0; t < trials; ++t) counts[sampler.Draw(rng)] += 1;
    const std::vector<double> exact = D2Probabilities(ds, prefix);
    EXPECT_LT(testing::TotalVariation(testing::Normalize(counts), exact), 0.02);
    EXPECT_GT(testing::ChiSquarePValue(counts, exact), 0.001);
  }
}

TEST(KMeansPP, FullRunPairDistribution) {
  // Distribution of the ordered pair of the first two centers.
  const Dataset ds(UniformPoints(6, 2, 7));
  std::vector<double> counts(36, 0.0), exact(36, 0.0);
  for (Index a = 0; a < 6; ++a) {
    const std::vector<double> q = D2Probabilities(ds, std::vector<Index>{a});
    for (Index b = 0; b < 6; ++b) exact[a * 6 + b] = q[b] / 6.0;
  }
  for (int s = 0; s < 100000; ++s) {
    const std::vector<Index> c = KMeansPPExact(ds, 2, s);
    counts[c[0] * 6 + c[1]] += 1;
  }
  EXPECT_LT(testing::TotalVariation(testing::Normalize(counts), exact), 0.02);
}

TEST(D2Probabilities, UniformWithoutCenters) {
  const Dataset ds(UniformPoints(4, 2, 7));
  for (double p : D2Probabilities(ds, {})) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(UniformSampling, DistinctAndPermutation) {
  const Dataset ds(UniformPoints(20, 2, 1));
  std::vector<Index> all = UniformSampling(ds, 20, 3);
  std::sort(all.begin(), all.end());
  std::vector<Index> expected(20);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(all, expected);
  for (int s = 0; s < 100; ++s) {
    const std::vector<Index> c = UniformSampling(ds, 7, s);
    EXPECT_EQ(std::set<Index>(c.begin(), c.end()).size(), 7u);
  }
}

TEST(UniformSampling, SingleIsUniform) {
  const Dataset ds(UniformPoints(16, 2, 1));
  std::vector<double> counts(16, 0.0);
  for (int s = 0; s < 100000; ++s) counts[UniformSampling(ds, 1, s)[0]] += 1;
  EXPECT_GT(testing::ChiSquarePValue(counts, std::vector<double>(16, 1.0 / 16)), 0.001);
}

TEST(Baselines, KMeansPPBeatsUniformOnSeparatedMixture) {
  const Dataset ds(GaussianMixture(2000, 5, 20, 200.0, 13));
  double pp = 0.0, uni = 0.0;
  for (int s = 0; s < 20; ++s) {
    pp += ClusteringCost(ds, KMeansPPExact(ds, 20, s));
    uni += ClusteringCost(ds, UniformSampling(ds, 20, s));
  }
  EXPECT_LT(pp, uni);
}

}  // namespace
}  // namespace fastkmpp
