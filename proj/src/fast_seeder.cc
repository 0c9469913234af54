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

#include "fastkmpp/fast_seeder.h"

#include <string>

namespace fastkmpp {

SeederState::SeederState(const MultiTree& mt)
    : mt_(&mt),
      sample_tree_(mt.size(), mt.cap()),
      weights_(mt.size(), mt.cap()),
      open_flag_(mt.size(), 0),
      decrease_counts_(mt.size(), 0) {
  marks_.reserve(mt.num_trees());
  for (const QuadTree& tree : mt.trees()) {
    marks_.emplace_back(static_cast<size_t>(tree.num_nodes()), 0);
  }
}

void SeederState::Open(Index x) {
  if (x < 0 || x >= mt_->size()) {
    throw InvalidArgument("cannot open point " + std::to_string(x));
  }
  if (open_flag_[x]) return;
  open_flag_[x] = 1;
  opened_.push_back(x);

  const std::span<const QuadTree> trees = mt_->trees();
  for (size_t t = 0; t < trees.size(); ++t) {
    const QuadTree& tree = trees[t];
    std::vector<std::uint8_t>& marks = marks_[t];

    path_.clear();
    NodeId v = tree.leaf_of(x);
    path_.push_back(v);
    while (tree.node(v).parent != kNoNode && !marks[tree.node(v).parent]) {
      v = tree.node(v).parent;
      path_.push_back(v);
    }
    for (NodeId u : path_) {
      if (!marks[u]) {
        marks[u] = 1;
        ++mark_events_;
      }
    }

    // Points in P(v_i) \ P(v_{i-1}) have their lowest common ancestor with x
    // at v_i, so they share one candidate distance.
    const std::span<const Index> order = tree.points_in_order();
    std::uint32_t inner_begin = 0;
    std::uint32_t inner_end = 0;
    for (size_t i = 0; i < path_.size(); ++i) {
      const TreeNode& node = tree.node(path_[i]);
      const double dist = tree.DistAtLcaLevel(node.level);
      const double candidate = dist * dist;
      auto relax = [&](std::uint32_t from, std::uint32_t to) {
        points_scanned_ += to - from;
        for (std::uint32_t pos = from; pos < to; ++pos) {
          const Index y = order[pos];
          if (candidate < weights_[y]) {
            weights_[y] = candidate;
            sample_tree_.Update(y, candidate);
            ++decrease_counts_[y];
          }
        }
      };
      if (i == 0) {
        relax(node.begin, node.end);
      } else {
        relax(node.begin, inner_begin);
        relax(inner_end, node.end);
      }
      inner_begin = node.begin;
      inner_end = node.end;
    }
  }
}

Index DrawNextCenter(const SeederState& state, Rng& rng) {
  const Index n = state.multitree().size();
  if (state.total_weight() > 0.0) {
    const Index x = state.Sample(rng);
    if (state.is_open(x)) {
      throw Error("internal error: sampled an already open point");
    }
    return x;
  }
  if (state.opened().empty()) return UniformIndex(rng, n);
  for (Index x = 0; x < n; ++x) {
    if (!state.is_open(x)) return x;
  }
  throw Error("all points are already open");
}

std::vector<Index> FastKMeansPP(const Dataset& ds, Index k, std::uint64_t seed,
                                FastSeedingOptions options) {
  if (k < 1 || k > ds.size()) {
    throw InvalidArgument("k must lie in [1, n], got " + std::to_string(k));
  }
  const MultiTree mt = MultiTree::Init(ds, DeriveSeed(seed, 1), options.multitree);
  SeederState state(mt);
  Rng rng = MakeRng(DeriveSeed(seed, 2));
  while (static_cast<Index>(state.opened().size()) < k) {
    state.Open(DrawNextCenter(state, rng));
  }
  return {state.opened().begin(), state.opened().end()};
}

}  // namespace fastkmpp
