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

#ifndef FASTKMPP_SAMPLE_TREE_H_
#define FASTKMPP_SAMPLE_TREE_H_

#include <cstdint>
#include <vector>

#include "fastkmpp/common.h"

namespace fastkmpp {

/// Array-backed complete binary tree over n weighted leaves. Node i has
/// children 2i and 2i + 1; the root is node 1. Leaves past n are permanent
/// zero-weight padding. Every internal node stores the sum of its children,
/// recomputed (not adjusted by deltas) on each update.
class SampleTree {
 public:
  SampleTree(Index n, double initial_weight);

  Index size() const { return n_; }
  double total() const { return nodes_[1]; }
  double weight(Index j) const { return nodes_.at(Leaf(j)); }

  /// Sets leaf j to w and refreshes its ancestors in O(log n).
  void Update(Index j, double w);

  /// Returns j with probability weight(j) / total() by walking down from the
  /// root and picking each child with probability proportional to its
  /// weight. Zero-weight leaves are never returned. Throws Error when
  /// total() is zero.
  Index Sample(Rng& rng) const;

  /// Recomputes all internal sums from the leaves and compares; returns the
  /// largest absolute discrepancy.
  double MaxSumDiscrepancy() const;

  /// Rebuilds all internal sums from the leaves in O(n).
  void Rebuild();

  /// When set, every Update is followed by a full consistency check that
  /// throws on failure. O(n) per update; test use only.
  void set_debug_checks(bool on) { debug_checks_ = on; }

  std::int64_t rebuilds() const { return rebuilds_; }

  static constexpr std::int64_t kAuditInterval = std::int64_t{1} << 16;
  static constexpr double kAuditTolerance = 1e-6;

 private:
  size_t Leaf(Index j) const;
  void Audit();

  Index n_;
  size_t leaves_;  // power of two >= n
  std::vector<double> nodes_;
  std::int64_t updates_since_audit_ = 0;
  std::int64_t rebuilds_ = 0;
  bool debug_checks_ = false;
};

}  // namespace fastkmpp

#endif  // FASTKMPP_SAMPLE_TREE_H_
