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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>

#include "fastkmpp/geometry.h"

namespace fastkmpp {

struct Dataset::LazyMeta {
  std::once_flag once;
  double aspect_ratio = 1.0;
};

namespace {

// Smallest positive gap between distinct values of any single coordinate.
// Two distinct points differ by at least this much in some coordinate, so it
// lower-bounds the smallest positive pairwise distance.
double MinPositiveCoordinateGap(const PointMatrix& points) {
  double gap = std::numeric_limits<double>::infinity();
  std::vector<double> column(points.rows());
  for (Index j = 0; j < points.cols(); ++j) {
    for (Index i = 0; i < points.rows(); ++i) column[i] = points(i, j);
    std::sort(column.begin(), column.end());
    for (size_t i = 1; i < column.size(); ++i) {
      const double g = column[i] - column[i - 1];
      if (g > 0.0) gap = std::min(gap, g);
    }
  }
  return gap;
}

Index CountDistinctRows(const PointMatrix& points) {
  std::vector<Index> order(points.rows());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](Index a, Index b) {
    for (Index j = 0; j < points.cols(); ++j) {
      if (points(a, j) != points(b, j)) return points(a, j) < points(b, j);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  Index distinct = order.empty() ? 0 : 1;
  for (size_t i = 1; i < order.size(); ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Dataset::Dataset(PointMatrix points)
    : points_(std::move(points)), meta_(std::make_shared<LazyMeta>()) {
  if (points_.rows() < 1 || points_.cols() < 1) {
    throw InvalidArgument("dataset must contain at least one point");
  }
  if (!points_.allFinite()) {
    throw InvalidArgument("dataset contains non-finite coordinates");
  }
  max_dist_bound_ = EstimateMaxDist(points_);
}

double Dataset::aspect_ratio() const {
  std::call_once(meta_->once, [this] {
    if (max_dist_bound_ == 0.0) {
      meta_->aspect_ratio = 1.0;
    } else if (size() <= kExactAspectRatioLimit) {
      meta_->aspect_ratio = ExactAspectRatio(points_);
    } else {
      meta_->aspect_ratio =
          std::max(1.0, max_dist_bound_ / MinPositiveCoordinateGap(points_));
    }
  });
  return meta_->aspect_ratio;
}

CsvError::CsvError(const std::string& what, Index row, Index column)
    : Error("csv row " + std::to_string(row) +
            (column > 0 ? ", column " + std::to_string(column) : "") + ": " +
            what),
      row_(row),
      column_(column) {}

Dataset ParseCsv(std::string_view text, CsvOptions options) {
  std::vector<double> values;
  Index width = -1;
  Index rows = 0;
  Index line_no = 0;
  size_t pos = 0;
  bool header_pending = options.skip_header;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    line = Trim(line);
    if (line.empty()) throw CsvError("empty line", line_no, 0);

    Index fields = 0;
    size_t start = 0;
    while (true) {
      size_t end = line.find(options.delimiter, start);
      std::string_view field =
          Trim(line.substr(start, end == std::string_view::npos
                                      ? std::string_view::npos
                                      : end - start));
      ++fields;
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double v = 0.0;
      auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() ||
          ptr != field.data() + field.size()) {
        throw CsvError("cannot parse '" + std::string(field) + "' as a number",
                       line_no, fields);
      }
      if (!std::isfinite(v)) {
        throw CsvError("non-finite value", line_no, fields);
      }
      values.push_back(v);
      if (end == std::string_view::npos) break;
      start = end + 1;
    }
    if (width < 0) {
      width = fields;
    } else if (fields != width) {
      throw CsvError("expected " + std::to_string(width) + " fields, found " +
                         std::to_string(fields),
                     line_no, 0);
    }
    ++rows;
  }
  if (rows == 0) throw CsvError("no data rows", line_no, 0);
  PointMatrix points =
      Eigen::Map<const PointMatrix>(values.data(), rows, width);
  return Dataset(std::move(points));
}

Dataset LoadCsv(const std::filesystem::path& path, CsvOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), options);
}

void WriteCsv(const std::filesystem::path& path, const PointMatrix& points,
              char delimiter) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = 0; j < points.cols(); ++j) {
      if (j > 0) out << delimiter;
      out << points(i, j);
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for " + path.string());
}

double EstimateMaxDist(const PointMatrix& points) {
  if (points.rows() <= 1) return 0.0;
  const double max_sq =
      (points.rowwise() - points.row(0)).rowwise().squaredNorm().maxCoeff();
  return 2.0 * std::sqrt(max_sq);
}

double ExactMaxPairwiseDist(const PointMatrix& points) {
  double best = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = i + 1; j < points.rows(); ++j) {
      best = std::max(best, SquaredDist(points.row(i), points.row(j)));
    }
  }
  return std::sqrt(best);
}

double ExactAspectRatio(const PointMatrix& points) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    for (Index j = i + 1; j < points.rows(); ++j) {
      const double d2 = SquaredDist(points.row(i), points.row(j));
      if (d2 > 0.0) {
        lo = std::min(lo, d2);
        hi = std::max(hi, d2);
      }
    }
  }
  if (hi == 0.0) return 1.0;
  return std::sqrt(hi / lo);
}

PointMatrix ApplyScaling(const PointMatrix& points, double scaling) {
  if (!(scaling > 0.0)) throw InvalidArgument("scaling factor must be positive");
  return (points.array() / scaling).floor().matrix();
}

std::pair<Dataset, PreprocessReport> Quantize(const Dataset& ds,
                                              QuantizeOptions options) {
  const Index n = ds.size();
  const Index d = ds.dim();
  Rng rng = MakeRng(options.seed);
  std::vector<Index> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  const Index sample = std::clamp<Index>(options.sample_size, 1, n);
  for (Index i = 0; i < sample; ++i) {
    std::swap(ids[i], ids[i + UniformIndex(rng, n - i)]);
  }
  ids.resize(sample);

  PreprocessReport report;
  report.estimated_opt = ClusteringCost(ds, ids);
  if (report.estimated_opt <= 0.0) {
    report.degenerate = true;
    return {ds, report};
  }
  report.scaling_factor = report.estimated_opt /
                          (static_cast<double>(n) * static_cast<double>(d) *
                           options.error_divisor);
  PointMatrix q = ApplyScaling(ds.points(), report.scaling_factor);
  Dataset out(std::move(q));
  report.clamped_duplicates =
      CountDistinctRows(ds.points()) - CountDistinctRows(out.points());
  return {std::move(out), report};
}

double ClusteringCost(const Dataset& ds, const PointMatrix& centers) {
  if (centers.rows() == 0) throw InvalidArgument("empty center set");
  if (centers.cols() != ds.dim()) {
    throw InvalidArgument("center dimension does not match dataset");
  }
  double total = 0.0;
  for (Index i = 0; i < ds.size(); ++i) {
    total += SquaredDistToSet(ds.point(i), centers);
  }
  return total;
}

PointMatrix GatherRows(const Dataset& ds, std::span<const Index> ids) {
  PointMatrix rows(static_cast<Index>(ids.size()), ds.dim());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= ds.size()) {
      throw InvalidArgument("point index out of range: " +
                            std::to_string(ids[i]));
    }
    rows.row(static_cast<Index>(i)) = ds.point(ids[i]);
  }
  return rows;
}

double ClusteringCost(const Dataset& ds, std::span<const Index> center_ids) {
  return ClusteringCost(ds, GatherRows(ds, center_ids));
}

std::vector<double> PrefixCosts(const Dataset& ds,
                                std::span<const Index> center_ids) {
  std::vector<double> costs;
  costs.reserve(center_ids.size());
  Eigen::VectorXd nearest =
      Eigen::VectorXd::Constant(ds.size(), std::numeric_limits<double>::infinity());
  for (Index c : center_ids) {
    if (c < 0 || c >= ds.size()) {
      throw InvalidArgument("point index out of range: " + std::to_string(c));
    }
    nearest = nearest.cwiseMin(
        (ds.points().rowwise() - ds.point(c)).rowwise().squaredNorm());
    costs.push_back(nearest.sum());
  }
  return costs;
}

}  // namespace fastkmpp
