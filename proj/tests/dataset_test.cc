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

#include "fastkmpp/dataset.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "fastkmpp/geometry.h"
#include "test_util.h"

namespace fastkmpp {
namespace {

using testing::UniformPoints;

TEST(Csv, ParsesSmallFile) {
  const Dataset ds = ParseCsv("0,0\n3,4\n0,4\n");
  EXPECT_EQ(ds.size(), 3);
  EXPECT_EQ(ds.dim(), 2);
  EXPECT_DOUBLE_EQ(ds.points()(1, 1), 4.0);
}

TEST(Csv, SingleValue) {
  const Dataset ds = ParseCsv("5");
  EXPECT_EQ(ds.size(), 1);
  EXPECT_EQ(ds.dim(), 1);
}

TEST(Csv, ReportsLocationOfBadField) {
  try {
    ParseCsv("1,x\n");
    FAIL() << "expected CsvError";
  } catch (const CsvError& e) {
    EXPECT_EQ(e.row(), 1);
    EXPECT_EQ(e.column(), 2);
  }
}

TEST(Csv, RejectsEmptyAndRaggedInput) {
  EXPECT_THROW(ParseCsv(""), CsvError);
  try {
    ParseCsv("1,2\n3\n");
    FAIL() << "expected CsvError";
  } catch (const CsvError& e) {
    EXPECT_EQ(e.row(), 2);
    EXPECT_EQ(e.column(), 0);
  }
  EXPECT_THROW(ParseCsv("1,2\n\n3,4\n"), CsvError);
}

TEST(Csv, HeaderAndDelimiter) {
  const Dataset ds = ParseCsv("a;b\n1;2\n3;4\n", CsvOptions{';', true});
  EXPECT_EQ(ds.size(), 2);
  EXPECT_DOUBLE_EQ(ds.points()(1, 0), 3.0);
}

TEST(Csv, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "fastkmpp_rt.csv";
  const PointMatrix m = UniformPoints(20, 3, 4);
  WriteCsv(path, m);
  const Dataset ds = LoadCsv(path);
  EXPECT_TRUE(ds.points().isApprox(m, 1e-15));
  std::filesystem::remove(path);
  EXPECT_THROW(LoadCsv(path), Error);
}

TEST(Dataset, RejectsNonFinite) {
  PointMatrix m(2, 1);
  m << 1.0, std::nan("");
  EXPECT_THROW(Dataset{m}, InvalidArgument);
  EXPECT_THROW(Dataset{PointMatrix(0, 2)}, InvalidArgument);
}

TEST(Geometry, Distances) {
  Eigen::RowVector2d a(0, 0), b(3, 4);
  EXPECT_DOUBLE_EQ(Dist(a, b), 5.0);
  EXPECT_DOUBLE_EQ(Dist(b, b), 0.0);
  const Eigen::RowVectorXd x = Eigen::RowVectorXd::Zero(2);
  const Eigen::RowVectorXd y = Eigen::RowVectorXd::Zero(3);
  EXPECT_THROW(Dist(x, y), InvalidArgument);
}

TEST(Geometry, MatchesNaiveLoopAndTriangleInequality) {
  const PointMatrix m = UniformPoints(30, 7, 11, -5, 5);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.rows(); ++j) {
      double s = 0;
      for (Index t = 0; t < 7; ++t) s += (m(i, t) - m(j, t)) * (m(i, t) - m(j, t));
      EXPECT_NEAR(Dist(m.row(i), m.row(j)), std::sqrt(s), 1e-12);
      EXPECT_DOUBLE_EQ(Dist(m.row(i), m.row(j)), Dist(m.row(j), m.row(i)));
      for (Index k = 0; k < m.rows(); k += 7) {
        EXPECT_LE(Dist(m.row(i), m.row(j)),
                  Dist(m.row(i), m.row(k)) + Dist(m.row(k), m.row(j)) + 1e-12);
      }
    }
  }
}

TEST(MaxDist, Examples) {
  PointMatrix two(2, 1);
  two << 0, 10;
  EXPECT_DOUBLE_EQ(EstimateMaxDist(two), 20.0);
  PointMatrix three(3, 1);
  three << 4, 0, 10;
  EXPECT_DOUBLE_EQ(EstimateMaxDist(three), 12.0);
  EXPECT_DOUBLE_EQ(ExactMaxPairwiseDist(three), 10.0);
  PointMatrix one(1, 3);
  one << 1, 2, 3;
  EXPECT_DOUBLE_EQ(EstimateMaxDist(one), 0.0);
  EXPECT_DOUBLE_EQ(Dataset(one).aspect_ratio(), 1.0);
}

TEST(MaxDist, WithinFactorTwoOfDiameter) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset ds(UniformPoints(400 * (seed + 1), 3, seed, -10, 10));
    const double truth = ExactMaxPairwiseDist(ds.points());
    EXPECT_LE(truth, ds.max_dist_bound() * (1 + 1e-12));
    EXPECT_LE(ds.max_dist_bound(), 2 * truth * (1 + 1e-12));
  }
}

TEST(AspectRatio, ExactOnSmallSets) {
  PointMatrix m(3, 1);
  m << 0, 1, 10;
  const Dataset ds(m);
  EXPECT_DOUBLE_EQ(ds.aspect_ratio(), 10.0);
  PointMatrix dup(3, 1);
  dup << 0, 0, 4;
  EXPECT_DOUBLE_EQ(Dataset(dup).aspect_ratio(), 1.0);
}

TEST(AspectRatio, EstimateIsUpperBoundOnLargeSets) {
  PointMatrix m = (UniformPoints(6000, 2, 3, 0, 1000)).array().floor().matrix();
  const Dataset ds(m);
  ASSERT_GT(ds.size(), Dataset::kExactAspectRatioLimit);
  const Dataset sub(m.topRows(2000));
  // A subset's aspect ratio never exceeds the full set's, which the
  // estimate bounds from above.
  EXPECT_GE(ds.aspect_ratio(), sub.aspect_ratio());
}

TEST(Cost, Examples) {
  PointMatrix m(2, 1);
  m << 0, 10;
  const Dataset ds(m);
  const std::vector<Index> zero{0};
  EXPECT_DOUBLE_EQ(ClusteringCost(ds, zero), 100.0);
  const std::vector<Index> all{0, 1};
  EXPECT_DOUBLE_EQ(ClusteringCost(ds, all), 0.0);
  EXPECT_THROW(ClusteringCost(ds, std::vector<Index>{}), InvalidArgument);
  EXPECT_THROW(ClusteringCost(ds, PointMatrix(0, 1)), InvalidArgument);
}

TEST(Cost, MatchesNaiveOracleAndIsMonotone) {
  const Dataset ds(UniformPoints(50, 4, 8));
  const std::vector<Index> centers{3, 17, 21, 40, 49};
  const std::vector<double> naive = testing::NaiveNearestSq(ds.points(), centers);
  double expected = 0;
  for (double v : naive) expected += v;
  EXPECT_NEAR(ClusteringCost(ds, centers), expected, 1e-9 * expected);
  EXPECT_NEAR(ClusteringCost(ds, GatherRows(ds, centers)), expected, 1e-9 * expected);
  const std::vector<double> prefix = PrefixCosts(ds, centers);
  ASSERT_EQ(prefix.size(), centers.size());
  for (size_t i = 0; i < prefix.size(); ++i) {
    const std::vector<Index> head(centers.begin(), centers.begin() + i + 1);
    EXPECT_NEAR(prefix[i], ClusteringCost(ds, head), 1e-9 * prefix[i]);
    if (i > 0) EXPECT_LE(prefix[i], prefix[i - 1]);
  }
}

TEST(Quantize, FloorOfScaledCoordinate) {
  PointMatrix m(1, 1);
  m << 1.2345;
  EXPECT_DOUBLE_EQ(ApplyScaling(m, 0.01)(0, 0), 123.0);
  EXPECT_THROW(ApplyScaling(m, 0.0), InvalidArgument);
}

TEST(Quantize, IdenticalPointsAreDegenerate) {
  PointMatrix m = PointMatrix::Constant(10, 3, 2.5);
  const auto [out, report] = Quantize(Dataset(m));
  EXPECT_TRUE(report.degenerate);
  EXPECT_TRUE(out.points().isApprox(m));
}

// Quantization error is measured on unit-scale data: the scaling factor is a
// squared length divided by a count, so its effect depends on the units.
TEST(Quantize, PreservesCostOfFixedCenters) {
  const std::vector<Index> centers{0, 10, 20, 30, 40};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds(UniformPoints(100, 2, 100 + seed));
    const auto [q, report] = Quantize(ds, QuantizeOptions{.seed = seed});
    ASSERT_FALSE(report.degenerate);
    EXPECT_GT(report.scaling_factor, 0.0);
    const double before = ClusteringCost(ds, centers);
    const double after =
        ClusteringCost(q, centers) * report.scaling_factor * report.scaling_factor;
    EXPECT_LE(std::abs(after - before), 0.005 * before) << "seed " << seed;
    for (Index i = 0; i < q.points().size(); ++i) {
      EXPECT_EQ(q.points().data()[i], std::floor(q.points().data()[i]));
    }
  }
}

TEST(Quantize, CountsNewDuplicates) {
  PointMatrix m(4, 1);
  m << 0.0, 0.1, 0.2, 100.0;
  const auto [q, report] = Quantize(Dataset(m), QuantizeOptions{.sample_size = 1,
                                                                .error_divisor = 0.001});
  if (!report.degenerate) {
    EXPECT_GE(report.clamped_duplicates, 0);
    EXPECT_EQ(q.size(), 4);  // multiplicity kept
  }
}

}  // namespace
}  // namespace fastkmpp
