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

#ifndef FASTKMPP_MULTITREE_H_
#define FASTKMPP_MULTITREE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fastkmpp/common.h"
#include "fastkmpp/dataset.h"
#include "fastkmpp/tree_embedding.h"

namespace fastkmpp {

struct MultiTreeOptions {
  /// Three trees give the distortion bound; other counts are for ablation.
  int num_trees = 3;
  TreeOptions tree;
};

/// Independently shifted tree embeddings of one dataset. The multi-tree
/// distance is the minimum tree distance over the trees; it never
/// underestimates the Euclidean distance and its square never exceeds
/// cap() = 16 * d * MaxDist^2.
class MultiTree {
 public:
  static MultiTree Init(const Dataset& ds, std::uint64_t seed,
                        MultiTreeOptions options = {});

  std::span<const QuadTree> trees() const { return trees_; }
  int num_trees() const { return static_cast<int>(trees_.size()); }
  Index size() const { return trees_.front().size(); }
  Index dim() const { return trees_.front().dim(); }

  /// M, the squared distance assigned to points with no open center.
  double cap() const { return cap_; }

  double Dist(Index p, Index q) const;

  /// min over s in `set` of Dist(p, s); sqrt(cap()) for an empty set.
  double DistToSet(Index p, std::span<const Index> set) const;

 private:
  MultiTree() = default;

  std::vector<QuadTree> trees_;
  double cap_ = 0.0;
};

}  // namespace fastkmpp

#endif  // FASTKMPP_MULTITREE_H_
