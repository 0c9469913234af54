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

#include "fastkmpp/multitree.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fastkmpp {

MultiTree MultiTree::Init(const Dataset& ds, std::uint64_t seed,
                          MultiTreeOptions options) {
  if (options.num_trees < 1) {
    throw InvalidArgument("a multi-tree needs at least one tree");
  }
  MultiTree mt;
  mt.trees_.reserve(options.num_trees);
  for (int t = 0; t < options.num_trees; ++t) {
    mt.trees_.push_back(QuadTree::Build(ds, DeriveSeed(seed, t), options.tree));
  }
  const double max_dist = ds.max_dist_bound();
  mt.cap_ = 16.0 * static_cast<double>(ds.dim()) * max_dist * max_dist;
  return mt;
}

double MultiTree::Dist(Index p, Index q) const {
  if (p < 0 || q < 0 || p >= size() || q >= size()) {
    throw InvalidArgument("point index out of range");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const QuadTree& tree : trees_) best = std::min(best, tree.TreeDist(p, q));
  return best;
}

double MultiTree::DistToSet(Index p, std::span<const Index> set) const {
  if (set.empty()) return std::sqrt(cap_);
  double best = std::numeric_limits<double>::infinity();
  for (Index s : set) best = std::min(best, Dist(p, s));
  return best;
}

}  // namespace fastkmpp
