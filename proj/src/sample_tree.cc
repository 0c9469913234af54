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

#include "fastkmpp/sample_tree.h"

#include <cmath>
#include <string>

namespace fastkmpp {

SampleTree::SampleTree(Index n, double initial_weight) : n_(n) {
  if (n < 1) throw InvalidArgument("sample tree needs at least one leaf");
  if (!(initial_weight >= 0.0) || !std::isfinite(initial_weight)) {
    throw InvalidArgument("initial weight must be finite and non-negative");
  }
  leaves_ = 1;
  while (leaves_ < static_cast<size_t>(n)) leaves_ <<= 1;
  nodes_.assign(2 * leaves_, 0.0);
  for (Index j = 0; j < n; ++j) nodes_[leaves_ + j] = initial_weight;
  Rebuild();
  rebuilds_ = 0;
}

size_t SampleTree::Leaf(Index j) const {
  if (j < 0 || j >= n_) {
    throw InvalidArgument("leaf index " + std::to_string(j) + " out of range");
  }
  return leaves_ + static_cast<size_t>(j);
}

void SampleTree::Update(Index j, double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw InvalidArgument("weight must be finite and non-negative");
  }
  size_t i = Leaf(j);
  nodes_[i] = w;
  for (i >>= 1; i >= 1; i >>= 1) nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
  if (++updates_since_audit_ >= kAuditInterval) Audit();
  if (debug_checks_ && MaxSumDiscrepancy() != 0.0) {
    throw Error("sample tree sum invariant violated");
  }
}

Index SampleTree::Sample(Rng& rng) const {
  if (!(nodes_[1] > 0.0)) throw Error("cannot sample: total weight is zero");
  size_t i = 1;
  while (i < leaves_) {
    const double left = nodes_[2 * i];
    const double right = nodes_[2 * i + 1];
    if (right <= 0.0) {
      i = 2 * i;
    } else if (left <= 0.0) {
      i = 2 * i + 1;
    } else {
      i = UniformUnit(rng) * (left + right) < left ? 2 * i : 2 * i + 1;
    }
  }
  return static_cast<Index>(i - leaves_);
}

double SampleTree::MaxSumDiscrepancy() const {
  double worst = 0.0;
  for (size_t i = leaves_ - 1; i >= 1; --i) {
    worst = std::max(worst,
                     std::abs(nodes_[i] - (nodes_[2 * i] + nodes_[2 * i + 1])));
  }
  return worst;
}

void SampleTree::Rebuild() {
  for (size_t i = leaves_ - 1; i >= 1; --i) {
    nodes_[i] = nodes_[2 * i] + nodes_[2 * i + 1];
  }
  ++rebuilds_;
}

void SampleTree::Audit() {
  updates_since_audit_ = 0;
  double sum = 0.0;
  double compensation = 0.0;
  for (Index j = 0; j < n_; ++j) {
    const double y = nodes_[leaves_ + j] - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
  const double scale = std::max(std::abs(sum), std::abs(nodes_[1]));
  if (scale > 0.0 && std::abs(sum - nodes_[1]) > kAuditTolerance * scale) {
    Rebuild();
  }
}

}  // namespace fastkmpp
