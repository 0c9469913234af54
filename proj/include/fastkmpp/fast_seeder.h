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

#ifndef FASTKMPP_FAST_SEEDER_H_
#define FASTKMPP_FAST_SEEDER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fastkmpp/common.h"
#include "fastkmpp/dataset.h"
#include "fastkmpp/multitree.h"
#include "fastkmpp/sample_tree.h"

namespace fastkmpp {

/// Opened centers and the sampling structure over a multi-tree.
///
/// Invariants after every Open():
///  1. weight(x) == MultiTreeDist(x, opened)^2, or cap() while nothing is
///     open;
///  2. the sample tree's internal nodes hold subtree sums of the weights;
///  3. an embedding-tree node is marked iff its subtree holds an opened
///     point.
///
/// Keeps a pointer to `mt`, which must outlive the state.
class SeederState {
 public:
  explicit SeederState(const MultiTree& mt);

  /// Opens x: in each tree, walks up from x's leaf to the highest unmarked
  /// ancestor whose parent is marked (or the root), marks that path, and
  /// lowers the weights of the points under it ring by ring. Opening an
  /// already open point is a no-op.
  void Open(Index x);

  /// Draws x with probability weight(x) / total_weight().
  Index Sample(Rng& rng) const { return sample_tree_.Sample(rng); }

  double weight(Index x) const { return weights_.at(x); }
  std::span<const double> weights() const { return weights_; }
  double total_weight() const { return sample_tree_.total(); }

  std::span<const Index> opened() const { return opened_; }
  bool is_open(Index x) const { return open_flag_.at(x) != 0; }
  bool IsMarked(int tree, NodeId v) const { return marks_.at(tree).at(v) != 0; }

  const MultiTree& multitree() const { return *mt_; }
  const SampleTree& sample_tree() const { return sample_tree_; }
  SampleTree& mutable_sample_tree() { return sample_tree_; }

  /// Number of unmarked -> marked transitions so far, over all trees.
  std::int64_t mark_events() const { return mark_events_; }
  /// Number of times each point's weight has decreased.
  std::span<const std::uint32_t> decrease_counts() const {
    return decrease_counts_;
  }
  /// Points whose candidate distance was evaluated, over all opens.
  std::int64_t points_scanned() const { return points_scanned_; }

 private:
  const MultiTree* mt_;
  SampleTree sample_tree_;
  std::vector<double> weights_;
  std::vector<std::vector<std::uint8_t>> marks_;
  std::vector<Index> opened_;
  std::vector<std::uint8_t> open_flag_;
  std::vector<std::uint32_t> decrease_counts_;
  std::vector<NodeId> path_;
  std::int64_t mark_events_ = 0;
  std::int64_t points_scanned_ = 0;
};

struct FastSeedingOptions {
  MultiTreeOptions multitree;
};

/// Seeds k centers by sampling from the D^2-distribution of the multi-tree
/// metric. Centers are returned in open order, so every prefix of length k'
/// is the k'-center solution of the same run.
///
/// When every remaining weight is zero (all points coincide with an opened
/// one) the lowest-index unopened point is opened next.
std::vector<Index> FastKMeansPP(const Dataset& ds, Index k, std::uint64_t seed,
                                FastSeedingOptions options = {});

/// Picks the next center from `state` by the rule above; the first center of
/// an empty state is uniform.
Index DrawNextCenter(const SeederState& state, Rng& rng);

}  // namespace fastkmpp

#endif  // FASTKMPP_FAST_SEEDER_H_
