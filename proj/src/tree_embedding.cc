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

#include "fastkmpp/tree_embedding.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fastkmpp {

namespace {

constexpr int kKeyBits = 62;
constexpr std::uint64_t kMaxKey = (std::uint64_t{1} << kKeyBits) - 1;

// Full-depth grid key of one shifted coordinate. The cell index at level h is
// key >> (kKeyBits - h), which nests exactly across levels.
std::uint64_t CoordinateKey(double x, double origin, double shift,
                            double root_side) {
  const double t = (x - origin + shift) / root_side;
  if (!(t > 0.0)) return 0;
  const double scaled = std::ldexp(t, kKeyBits);
  if (scaled >= static_cast<double>(kMaxKey)) return kMaxKey;
  return static_cast<std::uint64_t>(scaled);
}

}  // namespace

QuadTree QuadTree::Build(const Dataset& ds, std::uint64_t seed,
                         TreeOptions options) {
  QuadTree tree;
  const Index n = ds.size();
  const Index d = ds.dim();
  if (n > static_cast<Index>(std::numeric_limits<std::uint32_t>::max() - 1)) {
    throw InvalidArgument("dataset too large for 32-bit node ranges");
  }
  tree.dim_ = d;
  tree.max_dist_ = ds.max_dist_bound();

  Rng rng = MakeRng(seed);
  tree.shifts_.resize(options.independent_shifts ? d : 1);
  for (double& s : tree.shifts_) s = UniformUnit(rng) * tree.max_dist_;
  tree.origin_.resize(d);
  for (Index j = 0; j < d; ++j) tree.origin_[j] = ds.points().col(j).minCoeff();

  tree.order_.resize(n);
  std::iota(tree.order_.begin(), tree.order_.end(), Index{0});
  tree.nodes_.push_back(TreeNode{0, static_cast<std::uint32_t>(n), kNoNode, 0});
  tree.level_offsets_ = {0, 1};

  if (tree.max_dist_ > 0.0) {
    const double root_side = 2.0 * tree.max_dist_;
    std::vector<std::uint64_t> keys(static_cast<size_t>(n * d));
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) {
        const double s = tree.shifts_[tree.shifts_.size() == 1 ? 0 : j];
        keys[i * d + j] = CoordinateKey(ds.point(i)[j], tree.origin_[j], s,
                                        root_side);
      }
    }
    auto key_row = [&](Index p) { return keys.data() + p * d; };
    auto single_location = [&](std::uint32_t b, std::uint32_t e) {
      const std::uint64_t* first = key_row(tree.order_[b]);
      for (std::uint32_t pos = b + 1; pos < e; ++pos) {
        if (!std::equal(first, first + d, key_row(tree.order_[pos]))) {
          return false;
        }
      }
      return true;
    };

    std::vector<char> single = {single_location(0, static_cast<std::uint32_t>(n))};
    const Index words = (d + 63) / 64;
    std::vector<std::uint64_t> codes;
    std::vector<std::uint32_t> local;
    std::vector<Index> scratch;

    int h = 0;
    while (std::find(single.begin(), single.end(), 0) != single.end()) {
      ++h;
      const int bit = kKeyBits - h;
      std::vector<char> next_single;
      const NodeId parent_begin = tree.level_offsets_[h - 1];
      const NodeId parent_end = tree.level_offsets_[h];
      for (NodeId v = parent_begin; v < parent_end; ++v) {
        const std::uint32_t b = tree.nodes_[v].begin;
        const std::uint32_t e = tree.nodes_[v].end;
        if (single[v - parent_begin]) {
          tree.nodes_.push_back(TreeNode{b, e, v, h});
          next_single.push_back(1);
          continue;
        }
        // Children of a cell differ only in one bit per coordinate at this
        // level; group the slice by that d-bit code.
        const std::uint32_t count = e - b;
        codes.assign(static_cast<size_t>(count) * words, 0);
        for (std::uint32_t i = 0; i < count; ++i) {
          const std::uint64_t* row = key_row(tree.order_[b + i]);
          std::uint64_t* code = codes.data() + static_cast<size_t>(i) * words;
          for (Index j = 0; j < d; ++j) {
            code[j / 64] |= ((row[j] >> bit) & 1u) << (j % 64);
          }
        }
        local.resize(count);
        std::iota(local.begin(), local.end(), 0u);
        auto code_of = [&](std::uint32_t i) {
          return codes.data() + static_cast<size_t>(i) * words;
        };
        auto code_less = [&](std::uint32_t x, std::uint32_t y) {
          return std::lexicographical_compare(code_of(x), code_of(x) + words,
                                              code_of(y), code_of(y) + words);
        };
        std::stable_sort(local.begin(), local.end(), code_less);
        scratch.resize(count);
        for (std::uint32_t i = 0; i < count; ++i) {
          scratch[i] = tree.order_[b + local[i]];
        }
        std::copy(scratch.begin(), scratch.end(), tree.order_.begin() + b);
        std::uint32_t run = 0;
        for (std::uint32_t i = 1; i <= count; ++i) {
          if (i == count || code_less(local[i - 1], local[i])) {
            tree.nodes_.push_back(TreeNode{b + run, b + i, v, h});
            next_single.push_back(single_location(b + run, b + i) ? 1 : 0);
            run = i;
          }
        }
      }
      tree.level_offsets_.push_back(static_cast<NodeId>(tree.nodes_.size()));
      single = std::move(next_single);
    }
    tree.height_ = h;
  }

  tree.leaf_of_.resize(n);
  for (NodeId v = tree.level_begin(tree.height_); v < tree.level_end(tree.height_);
       ++v) {
    for (std::uint32_t pos = tree.nodes_[v].begin; pos < tree.nodes_[v].end;
         ++pos) {
      tree.leaf_of_[tree.order_[pos]] = v;
    }
  }

  tree.lca_dist_.assign(tree.height_ + 1, 0.0);
  for (int j = tree.height_ - 1; j >= 0; --j) {
    tree.lca_dist_[j] = tree.lca_dist_[j + 1] + 2.0 * tree.EdgeWeight(j);
  }
  return tree;
}

double QuadTree::EdgeWeight(int level) const {
  if (level < 0 || level >= height_) {
    throw InvalidArgument("edge level " + std::to_string(level) +
                          " outside [0, " + std::to_string(height_) + ")");
  }
  return std::sqrt(static_cast<double>(dim_)) * std::ldexp(max_dist_, -level);
}

int QuadTree::LcaLevel(Index p, Index q) const {
  NodeId a = leaf_of_.at(p);
  NodeId b = leaf_of_.at(q);
  while (a != b) {
    a = nodes_[a].parent;
    b = nodes_[b].parent;
  }
  return nodes_[a].level;
}

double QuadTree::TreeDist(Index p, Index q) const {
  return lca_dist_[LcaLevel(p, q)];
}

CellId QuadTree::CellOf(const Dataset& ds, Index p, int level) const {
  if (level < 0 || level > height_) {
    throw InvalidArgument("level out of range");
  }
  CellId cell{level, std::vector<std::int64_t>(dim_, 0)};
  if (max_dist_ == 0.0) return cell;
  const double root_side = 2.0 * max_dist_;
  for (Index j = 0; j < dim_; ++j) {
    const double s = shifts_[shifts_.size() == 1 ? 0 : j];
    const std::uint64_t key =
        CoordinateKey(ds.point(p)[j], origin_[j], s, root_side);
    cell.index[j] = static_cast<std::int64_t>(key >> (kKeyBits - level));
  }
  return cell;
}

}  // namespace fastkmpp
