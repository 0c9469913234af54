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

#ifndef FASTKMPP_BASELINES_H_
#define FASTKMPP_BASELINES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fastkmpp/common.h"
#include "fastkmpp/dataset.h"

namespace fastkmpp {

/// Exact D^2-sampling state: the squared distance of every point to its
/// nearest chosen center, refreshed in O(n d) per added center.
class D2Sampler {
 public:
  explicit D2Sampler(const Dataset& ds);

  void Add(Index center);
  /// Next center: uniform while empty, else proportional to
  /// nearest_sq()[x]; lowest-index unchosen point once all mass is zero.
  Index Draw(Rng& rng) const;

  std::span<const double> nearest_sq() const {
    return {nearest_sq_.data(), static_cast<size_t>(nearest_sq_.size())};
  }
  std::span<const Index> centers() const { return centers_; }

 private:
  const Dataset* ds_;
  Eigen::VectorXd nearest_sq_;
  std::vector<Index> centers_;
  std::vector<std::uint8_t> chosen_;
};

/// k-means++ seeding (exact D^2-sampling), Theta(n k d).
std::vector<Index> KMeansPPExact(const Dataset& ds, Index k,
                                 std::uint64_t seed);

/// k distinct points uniformly at random, in random order.
std::vector<Index> UniformSampling(const Dataset& ds, Index k,
                                   std::uint64_t seed);

/// Exact D^2 probabilities of every point given a fixed center set: the
/// reference distribution for the samplers. Uniform when `centers` is empty.
std::vector<double> D2Probabilities(const Dataset& ds,
                                    std::span<const Index> centers);

}  // namespace fastkmpp

#endif  // FASTKMPP_BASELINES_H_
