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

#include "fastkmpp/baselines.h"

#include <limits>
#include <numeric>
#include <string>

#include "fastkmpp/geometry.h"

namespace fastkmpp {

namespace {

void CheckK(const Dataset& ds, Index k) {
  if (k < 1 || k > ds.size()) {
    throw InvalidArgument("k must lie in [1, n], got " + std::to_string(k));
  }
}

}  // namespace

D2Sampler::D2Sampler(const Dataset& ds)
    : ds_(&ds),
      nearest_sq_(Eigen::VectorXd::Constant(
          ds.size(), std::numeric_limits<double>::infinity())),
      chosen_(ds.size(), 0) {}

void D2Sampler::Add(Index center) {
  if (center < 0 || center >= ds_->size()) {
    throw InvalidArgument("center index out of range");
  }
  centers_.push_back(center);
  chosen_[center] = 1;
  nearest_sq_ = nearest_sq_.cwiseMin(
      (ds_->points().rowwise() - ds_->point(center)).rowwise().squaredNorm());
}

Index D2Sampler::Draw(Rng& rng) const {
  const Index n = ds_->size();
  if (centers_.empty()) return UniformIndex(rng, n);
  // The running prefix sum is also the normalizer, so the returned index
  // always has positive mass.
  const double total = nearest_sq_.sum();
  if (total > 0.0) {
    const double target = UniformUnit(rng) * total;
    double cumulative = 0.0;
    Index last_positive = -1;
    for (Index i = 0; i < n; ++i) {
      if (nearest_sq_[i] <= 0.0) continue;
      cumulative += nearest_sq_[i];
      last_positive = i;
      if (cumulative > target) return i;
    }
    return last_positive;
  }
  for (Index i = 0; i < n; ++i) {
    if (!chosen_[i]) return i;
  }
  throw Error("all points are already chosen");
}

std::vector<Index> KMeansPPExact(const Dataset& ds, Index k,
                                 std::uint64_t seed) {
  CheckK(ds, k);
  Rng rng = MakeRng(seed);
  D2Sampler sampler(ds);
  while (static_cast<Index>(sampler.centers().size()) < k) {
    sampler.Add(sampler.Draw(rng));
  }
  return {sampler.centers().begin(), sampler.centers().end()};
}

std::vector<Index> UniformSampling(const Dataset& ds, Index k,
                                   std::uint64_t seed) {
  CheckK(ds, k);
  Rng rng = MakeRng(seed);
  std::vector<Index> ids(ds.size());
  std::iota(ids.begin(), ids.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    std::swap(ids[i], ids[i + UniformIndex(rng, ds.size() - i)]);
  }
  ids.resize(k);
  return ids;
}

std::vector<double> D2Probabilities(const Dataset& ds,
                                    std::span<const Index> centers) {
  const Index n = ds.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  if (centers.empty()) return p;
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index c : centers) best = std::min(best, SquaredDist(ds.point(i), ds.point(c)));
    p[i] = best;
    total += best;
  }
  for (double& v : p) v = total > 0.0 ? v / total : 0.0;
  return p;
}

}  // namespace fastkmpp
