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

#ifndef FASTKMPP_TREE_EMBEDDING_H_
#define FASTKMPP_TREE_EMBEDDING_H_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "fastkmpp/common.h"
#include "fastkmpp/dataset.h"

namespace fastkmpp {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct TreeNode {
  /// P_T(v) is points_in_order()[begin, end).
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  NodeId parent = kNoNode;
  std::int32_t level = 0;

  std::uint32_t count() const { return end - begin; }
};

/// Grid cell of a point at a given level: per-coordinate integer indices of
/// the cell of side 2 * MaxDist / 2^level that contains the shifted point.
struct CellId {
  int level = 0;
  std::vector<std::int64_t> index;

  friend bool operator==(const CellId&, const CellId&) = default;
};

struct TreeOptions {
  /// Draw one shift per coordinate instead of a single scalar shift.
  bool independent_shifts = false;
};

/// One randomly shifted hierarchical grid embedding of a dataset.
///
/// The root cell has side 2 * MaxDist and its low corner at the per-coordinate
/// minimum of the unshifted data; the data is translated by a shift drawn
/// uniformly from [0, MaxDist). Every level halves the cell side. Only
/// nonempty cells are materialized, and a cell is split until it holds points
/// of a single location, so all leaves sit at level height() and identical
/// points share a leaf.
///
/// Nodes are stored level by level. Each node's point set P_T(v) is a
/// contiguous slice of one permutation of the point indices, so the slice of
/// a child is nested in the slice of its parent.
class QuadTree {
 public:
  static QuadTree Build(const Dataset& ds, std::uint64_t seed,
                        TreeOptions options = {});

  int height() const { return height_; }
  Index size() const { return static_cast<Index>(leaf_of_.size()); }
  Index dim() const { return dim_; }
  double max_dist() const { return max_dist_; }
  std::span<const double> shifts() const { return shifts_; }

  /// Length of an edge between levels j and j + 1: sqrt(d) * MaxDist / 2^j.
  /// Throws InvalidArgument unless 0 <= j < height().
  double EdgeWeight(int level) const;

  /// Tree distance between two points whose lowest common ancestor is at
  /// `level`: 2 * sum_{j = level}^{H - 1} EdgeWeight(j).
  double DistAtLcaLevel(int level) const { return lca_dist_.at(level); }

  int LcaLevel(Index p, Index q) const;
  double TreeDist(Index p, Index q) const;

  NodeId root() const { return 0; }
  NodeId leaf_of(Index p) const { return leaf_of_.at(p); }
  const TreeNode& node(NodeId v) const { return nodes_[v]; }
  Index num_nodes() const { return static_cast<Index>(nodes_.size()); }

  /// Nodes of level h are the ids [level_begin(h), level_begin(h + 1)).
  NodeId level_begin(int h) const { return level_offsets_.at(h); }
  NodeId level_end(int h) const { return level_offsets_.at(h + 1); }

  std::span<const Index> points_in_order() const { return order_; }
  std::span<const Index> PointsOf(NodeId v) const {
    return std::span<const Index>(order_).subspan(nodes_[v].begin,
                                                  nodes_[v].count());
  }

  /// Recomputes the grid cell of point p directly from its coordinates.
  CellId CellOf(const Dataset& ds, Index p, int level) const;

 private:
  QuadTree() = default;

  Index dim_ = 0;
  int height_ = 0;
  double max_dist_ = 0.0;
  std::vector<double> shifts_;
  std::vector<double> origin_;
  std::vector<TreeNode> nodes_;
  std::vector<NodeId> level_offsets_;
  std::vector<NodeId> leaf_of_;
  std::vector<Index> order_;
  std::vector<double> lca_dist_;
};

}  // namespace fastkmpp

#endif  // FASTKMPP_TREE_EMBEDDING_H_
