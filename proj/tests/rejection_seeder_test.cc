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

#include "fastkmpp/rejection_seeder.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fastkmpp/baselines.h"
#include "test_util.h"

namespace fastkmpp {
namespace {

using testing::GaussianMixture;
using testing::UniformPoints;

RejectionOptions ExactOptions() {
  RejectionOptions options;
  options.c = 1.0;
  options.lsh.mode = LshMode::kExactOracle;
  return options;
}

TEST(RejectionSampling, SingleCenterIsUniform) {
  const Dataset ds(UniformPoints(16, 2, 3, 0, 100));
  std::vector<double> counts(16, 0.0);
  for (int s = 0; s < 100000; ++s) {
    const RejectionResult r = RejectionSampling(ds, 1, s);
    counts[r.centers[0]] += 1;
    ASSERT_EQ(r.stats.proposals, 1);
  }
  EXPECT_GT(testing::ChiSquarePValue(counts, std::vector<double>(16, 1.0 / 16)), 0.001);
}

TEST(RejectionSampling, ExactOracleMatchesD2GivenFirstCenter) {
  const Dataset ds(UniformPoints(12, 2, 4));
  const std::vector<Index> first{5};
  const BiasReport report = SamplingBiasReport(ds, first, ExactOptions(), 100000, 7);
  EXPECT_LT(report.tv_distance, 0.02);
  EXPECT_TRUE(report.all_within);
}

TEST(RejectionSampling, ExactOracleRatioNeverAboveOne) {
  const Dataset ds(GaussianMixture(400, 3, 8, 50.0, 4));
  for (double c : {1.0, 2.0}) {
    RejectionOptions options = ExactOptions();
    options.c = c;
    options.debug_checks = true;
    std::int64_t proposals = 0;
    for (int s = 0; proposals < 10000; ++s) {
      const RejectionResult r = RejectionSampling(ds, 40, s, options);
      proposals += r.stats.proposals;
      EXPECT_LE(r.stats.max_ratio, 1.0 + 1e-12);
      EXPECT_EQ(r.stats.clamp_activations, 0);
    }
  }
}

TEST(RejectionSampling, EquidistantPointsAreUniform) {
  // Center at the origin and eight points at unit distance.
  PointMatrix m = PointMatrix::Zero(9, 4);
  for (int i = 0; i < 4; ++i) {
    m(1 + 2 * i, i) = 1.0;
    m(2 + 2 * i, i) = -1.0;
  }
  const Dataset ds(m);
  const std::vector<Index> center{0};
  const BiasReport report = SamplingBiasReport(ds, center, ExactOptions(), 20000, 2);
  EXPECT_EQ(report.rows[0].empirical, 0.0);
  for (Index x = 1; x < 9; ++x) EXPECT_DOUBLE_EQ(report.rows[x].exact, 1.0 / 8);
  EXPECT_TRUE(report.all_within);
  std::vector<double> counts;
  for (Index x = 1; x < 9; ++x) counts.push_back(report.rows[x].empirical * 20000);
  EXPECT_GT(testing::ChiSquarePValue(counts, std::vector<double>(8, 1.0 / 8)), 0.001);
}

TEST(RejectionSampling, PracticalLshBiasWithinFactor) {
  const Dataset ds(UniformPoints(64, 2, 6, 0, 100));
  RejectionOptions options;
  options.c = 2.0;
  const std::vector<Index> centers{3, 30};
  const BiasReport report = SamplingBiasReport(ds, centers, options, 20000, 3);
  for (const BiasRow& row : report.rows) {
    EXPECT_TRUE(row.within) << "point " << row.id << " f=" << row.empirical
                            << " q=" << row.exact;
  }
  const auto path = std::filesystem::temp_directory_path() / "fastkmpp_bias.csv";
  WriteBiasCsv(path, report);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "id,exact,empirical,lower,upper,within");
  std::filesystem::remove(path);
}

TEST(RejectionSampling, ArgumentChecks) {
  const Dataset ds(UniformPoints(10, 2, 1));
  EXPECT_THROW(RejectionSampling(ds, 0, 1), InvalidArgument);
  EXPECT_THROW(RejectionSampling(ds, 11, 1), InvalidArgument);
  RejectionOptions bad;
  bad.c = 0.5;
  EXPECT_THROW(RejectionSampling(ds, 2, 1, bad), InvalidArgument);
  EXPECT_THROW(SamplingBiasReport(ds, {}, RejectionOptions{}, 1000, 1), InvalidArgument);
  const std::vector<Index> s{1};
  EXPECT_THROW(SamplingBiasReport(ds, s, RejectionOptions{}, 999, 1), InvalidArgument);
}

TEST(RejectionSampling, BudgetExhaustionCarriesStats) {
  const Dataset ds(UniformPoints(50, 2, 1));
  RejectionOptions options;
  options.max_proposals = 2;
  try {
    RejectionSampling(ds, 10, 1, options);
    FAIL() << "expected budget exhaustion";
  } catch (const ProposalBudgetExceeded& e) {
    EXPECT_GE(e.stats().proposals, 2);
    EXPECT_GE(e.stats().accepted, 1);
  }
}

TEST(RejectionSampling, StatsAndDistinctCenters) {
  const Dataset large(GaussianMixture(2000, 4, 10, 40.0, 8));
  // Theoretical mode keeps thousands of tables per scale; a smaller input
  // exercises the same bookkeeping in reasonable time.
  const Dataset small(GaussianMixture(200, 4, 10, 40.0, 8));
  for (LshMode mode : {LshMode::kExactOracle, LshMode::kPractical, LshMode::kTheoretical}) {
    SCOPED_TRACE(LshModeName(mode));
    const Dataset& ds = mode == LshMode::kTheoretical ? small : large;
    RejectionOptions options;
    options.lsh.mode = mode;
    const RejectionResult r = RejectionSampling(ds, 30, 5, options);
    EXPECT_EQ(r.centers.size(), 30u);
    EXPECT_EQ(std::set<Index>(r.centers.begin(), r.centers.end()).size(), 30u);
    EXPECT_EQ(r.stats.accepted, 30);
    EXPECT_GE(r.stats.proposals, 30);
    ASSERT_EQ(r.stats.per_round.size(), 30u);
    std::int64_t sum = 0;
    for (std::int64_t c : r.stats.per_round) {
      EXPECT_GE(c, 1);
      sum += c;
    }
    EXPECT_EQ(sum, r.stats.proposals);
    EXPECT_EQ(r.stats.per_round[0], 1);
    EXPECT_GT(r.stats.wall_seconds, 0.0);
    const double per_center = static_cast<double>(r.stats.proposals) / 30;
    EXPECT_LE(per_center, 64.0 * 4 * 16);
    const nlohmann::json j = nlohmann::json::parse(StatsToJson(r.stats));
    EXPECT_EQ(j["accepted"], 30);
    EXPECT_EQ(j["per_round"].size(), 30u);
    EXPECT_EQ(RejectionSampling(ds, 30, 5, options).centers, r.centers);
  }
}

TEST(RejectionSampling, DuplicatePointsFinish) {
  PointMatrix m(6, 1);
  m << 1, 1, 1, 4, 4, 8;
  const RejectionResult r = RejectionSampling(Dataset(m), 6, 2);
  EXPECT_EQ(std::set<Index>(r.centers.begin(), r.centers.end()).size(), 6u);
}

TEST(RejectionSampling, SamplerRejectsOpenedProposals) {
  const Dataset ds(UniformPoints(30, 2, 9));
  RejectionSampler sampler(ds, ExactOptions(), 1);
  for (int i = 0; i < 30; ++i) {
    const Index x = sampler.Step();
    EXPECT_EQ(sampler.state().weight(x), 0.0);
  }
  EXPECT_THROW(sampler.DrawNext(), Error);
}

TEST(RejectionSampling, BestOfRestarts) {
  const Dataset ds(GaussianMixture(300, 2, 5, 30.0, 2));
  const int restarts = ParanoidRestarts(ds);
  const double n = 300.0;
  const double delta = ds.aspect_ratio();
  EXPECT_EQ(restarts, static_cast<int>(std::ceil(std::log(4 * n * delta * delta) / std::log(n))));
  const RejectionResult best = RejectionSamplingBestOf(ds, 5, 3, restarts);
  EXPECT_EQ(best.stats.restarts, restarts);
  const double best_cost = ClusteringCost(ds, best.centers);
  EXPECT_LE(best_cost, ClusteringCost(ds, RejectionSampling(ds, 5, 3).centers));
  EXPECT_THROW(RejectionSamplingBestOf(ds, 5, 3, 0), InvalidArgument);
}

}  // namespace
}  // namespace fastkmpp
