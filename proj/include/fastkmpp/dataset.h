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

#ifndef FASTKMPP_DATASET_H_
#define FASTKMPP_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fastkmpp/common.h"

namespace fastkmpp {

/// An immutable set of n points in R^d together with the global metric
/// metadata that the tree embeddings and LSH scales are derived from.
///
/// `max_dist_bound()` is the one-pass 2-approximation of the diameter taken
/// from the first point. `aspect_ratio()` is computed on first use and cached;
/// the cache is shared between copies and is safe to fill concurrently.
class Dataset {
 public:
  /// Throws InvalidArgument if `points` is empty or contains a non-finite
  /// coordinate.
  explicit Dataset(PointMatrix points);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }

  const PointMatrix& points() const { return points_; }
  auto point(Index i) const { return points_.row(i); }

  double max_dist_bound() const { return max_dist_bound_; }

  /// Ratio of the largest to the smallest positive pairwise distance. Exact
  /// (brute force) for n <= kExactAspectRatioLimit; otherwise the upper
  /// bound max_dist_bound / (smallest positive per-coordinate gap). Returns 1
  /// when all points coincide.
  double aspect_ratio() const;

  static constexpr Index kExactAspectRatioLimit = 5000;

 private:
  struct LazyMeta;

  PointMatrix points_;
  double max_dist_bound_ = 0.0;
  std::shared_ptr<LazyMeta> meta_;
};

/// Raised for malformed CSV input. `row` and `column` are 1-based; `column`
/// is 0 for row-level errors such as inconsistent widths.
class CsvError : public Error {
 public:
  CsvError(const std::string& what, Index row, Index column);
  Index row() const { return row_; }
  Index column() const { return column_; }

 private:
  Index row_;
  Index column_;
};

struct CsvOptions {
  char delimiter = ',';
  bool skip_header = false;
};

/// Parses one point per line. Blank lines inside the file are rejected; a
/// single trailing newline is accepted.
Dataset LoadCsv(const std::filesystem::path& path, CsvOptions options = {});
Dataset ParseCsv(std::string_view text, CsvOptions options = {});

void WriteCsv(const std::filesystem::path& path, const PointMatrix& points,
              char delimiter = ',');

/// 2 * max_q dist(p0, q) for the first point p0. Lies within
/// [diameter, 2 * diameter]. Returns 0 for n = 1.
double EstimateMaxDist(const PointMatrix& points);

/// Exact max / min positive pairwise distance; O(n^2 d). 1 if no positive
/// distance exists.
double ExactAspectRatio(const PointMatrix& points);

/// Exact diameter; O(n^2 d). Test and diagnostics helper.
double ExactMaxPairwiseDist(const PointMatrix& points);

struct PreprocessReport {
  double scaling_factor = 1.0;
  /// Cost of the reference solution formed by the randomly sampled points.
  double estimated_opt = 0.0;
  /// Points that coincide with an earlier point after quantization but did
  /// not before.
  Index clamped_duplicates = 0;
  /// Set when the reference cost is zero; the dataset is returned unchanged.
  bool degenerate = false;
};

struct QuantizeOptions {
  Index sample_size = 20;
  double error_divisor = 200.0;
  std::uint64_t seed = 0;
};

/// floor(x / scaling) for every coordinate x.
PointMatrix ApplyScaling(const PointMatrix& points, double scaling);

/// Replaces every coordinate x by floor(x / s) where
/// s = cost(random sample_size-point solution) / (n * d * error_divisor).
std::pair<Dataset, PreprocessReport> Quantize(const Dataset& ds,
                                              QuantizeOptions options = {});

/// Sum over points of the squared distance to the nearest center row.
/// Throws InvalidArgument for an empty center set.
double ClusteringCost(const Dataset& ds, const PointMatrix& centers);
double ClusteringCost(const Dataset& ds, std::span<const Index> center_ids);

/// Costs of every prefix of an ordered center sequence: entry i is the cost
/// of the first i + 1 centers. O(n k d).
std::vector<double> PrefixCosts(const Dataset& ds,
                                std::span<const Index> center_ids);

PointMatrix GatherRows(const Dataset& ds, std::span<const Index> ids);

}  // namespace fastkmpp

#endif  // FASTKMPP_DATASET_H_
