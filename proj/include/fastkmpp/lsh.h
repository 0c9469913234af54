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

#ifndef FASTKMPP_LSH_H_
#define FASTKMPP_LSH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fastkmpp/common.h"
#include "fastkmpp/dataset.h"

namespace fastkmpp {

/// Probability that two points at distance u collide under one p-stable
/// (Gaussian) hash h(x) = floor((<a, x> + b) / r):
///   1 - 2 Phi(-r/u) - 2u / (sqrt(2 pi) r) * (1 - exp(-r^2 / (2 u^2))).
double CollisionProbability(double u, double bucket_width);

/// Table parameters of one gap structure.
struct LshParams {
  double p1 = 0.0;
  double p2 = 0.0;
  double delta = 0.0;
  Index n = 0;
  double rho = 0.0;
  double eta = 0.0;
  /// Values given by the formulas, before any cap. `ell_formula` may be
  /// astronomically large and is kept as a double.
  double m_formula = 0.0;
  double ell_formula = 0.0;
  /// Values actually used to build tables.
  int m = 1;
  int ell = 1;
  bool capped = false;
};

/// rho = log(1/p1) / log(1/p2), eta = (delta / n)^(3 / (1 - rho)),
/// m = ceil(log(1/eta) / log(1/p2)), ell = ceil(100 log(1/eta) (1/eta)^rho).
/// Throws InvalidArgument unless 0 < p2 < p1 < 1, 0 < delta < 1, n >= 1.
LshParams DeriveParamsFromProbabilities(Index n, double delta, double p1,
                                        double p2);

/// Same, with p1 = CollisionProbability(radius, r) and
/// p2 = CollisionProbability(c * radius, r).
LshParams DeriveParams(Index n, double c, double delta, double bucket_width,
                       double radius);

/// When ell exceeds `max_tables`, replaces (m, ell) by the pair with the
/// lowest expected query cost ell * (m + n * p2^m) that still satisfies
/// (1 - p1^m)^ell <= eta with ell <= max_tables; falls back to m = 1,
/// ell = max_tables if none does. Sets `capped`.
LshParams CapTables(LshParams params, Index max_tables);

struct Neighbor {
  Index id = -1;
  double dist = 0.0;
};

/// The (c, R) gap structure: `ell` hash tables keyed by concatenations of `m`
/// p-stable hashes. Buckets are append-only lists; a query takes, per table,
/// the first bucket entry within c * R and returns the closest of those.
/// Appending never changes an existing candidate, so the reported distance
/// for a fixed query point is non-increasing under insertions.
class GapLsh {
 public:
  GapLsh(const Dataset& ds, double radius, double c, int m, int ell,
         double bucket_width, std::uint64_t seed);

  void Insert(Index p);
  std::optional<Neighbor> Query(Index p) const;

  double radius() const { return radius_; }
  double c() const { return c_; }
  int m() const { return m_; }
  int ell() const { return ell_; }
  double bucket_width() const { return bucket_width_; }

  /// Contents of the bucket that `p` hashes to in `table`, in list order.
  std::vector<Index> BucketContents(int table, Index p) const;
  /// Hash tuple f_table(p).
  std::vector<std::int64_t> HashTuple(int table, Index p) const;

 private:
  struct Bucket {
    std::uint32_t head;
    std::uint32_t tail;
    std::uint32_t next_same_slot;  // chain of distinct tuples sharing a slot
    std::uint32_t table;
  };
  struct Entry {
    std::uint32_t point;
    std::uint32_t next;
  };

  void Project(Index p, Eigen::VectorXd& out) const;
  std::uint64_t SlotKey(int table, const std::int64_t* tuple) const;
  std::uint32_t FindBucket(int table, const std::int64_t* tuple,
                           std::uint64_t key) const;
  std::uint32_t FindSlot(std::uint64_t key) const;
  void Grow();

  const Dataset* ds_;
  double radius_;
  double c_;
  int m_;
  int ell_;
  double bucket_width_;
  PointMatrix projections_;  // (ell * m) x d, standard normal entries
  Eigen::VectorXd offsets_;  // uniform in [0, r)

  // Open-addressing map from slot key to the first bucket with that key.
  std::vector<std::uint64_t> slot_keys_;
  std::vector<std::uint32_t> slot_buckets_;
  std::size_t slots_used_ = 0;

  std::vector<Bucket> buckets_;
  std::vector<std::int64_t> bucket_tuples_;  // m values per bucket
  std::vector<Entry> entries_;
  mutable Eigen::VectorXd scratch_;
  mutable std::vector<std::int64_t> tuple_scratch_;
};

enum class LshMode { kExactOracle, kTheoretical, kPractical };

LshMode ParseLshMode(const std::string& name);
std::string LshModeName(LshMode mode);

struct LshConfig {
  LshMode mode = LshMode::kPractical;
  double c = 2.0;
  /// Practical profile: one scale, m = 15 concatenated hashes, bucket width
  /// r = 10, `practical_tables` tables, radius MaxDist / (2c) unless set.
  int practical_m = 15;
  int practical_tables = 10;
  double practical_bucket_width = 10.0;
  std::optional<double> practical_radius;
  /// Theoretical profile: bucket width r = factor * R at every scale.
  double theoretical_width_factor = 4.0;
  /// Overrides for m and ell in either LSH mode.
  std::optional<int> m_override;
  std::optional<int> ell_override;
};

/// Monotone c-approximate nearest-neighbor index over inserted dataset
/// points. The theoretical mode stacks gap structures at geometrically
/// spaced radii R_i = g^(i-1) MaxDist / (2 Delta) with c_i = c / g, where the
/// ratio g is 2 for c >= 4 and sqrt(c) otherwise; each has failure parameter
/// delta = 1 / (n * #scales). The exact-oracle mode answers by brute force.
class LshIndex {
 public:
  LshIndex(const Dataset& ds, LshConfig config, std::uint64_t seed);

  void Insert(Index p);
  std::optional<Neighbor> Query(Index p) const;

  LshMode mode() const { return config_.mode; }
  const LshConfig& config() const { return config_; }
  Index num_inserted() const { return static_cast<Index>(inserted_.size()); }
  std::span<const GapLsh> scales() const { return scales_; }
  std::span<const LshParams> params() const { return params_; }

 private:
  const Dataset* ds_;
  LshConfig config_;
  std::vector<GapLsh> scales_;
  std::vector<LshParams> params_;
  std::vector<Index> inserted_;
};

}  // namespace fastkmpp

#endif  // FASTKMPP_LSH_H_
