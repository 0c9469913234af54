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

#ifndef FASTKMPP_GEOMETRY_H_
#define FASTKMPP_GEOMETRY_H_

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "fastkmpp/common.h"

namespace fastkmpp {

/// Squared Euclidean distance between two row or column vectors.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar SquaredDist(const Eigen::MatrixBase<DerivedA>& p,
                                      const Eigen::MatrixBase<DerivedB>& q) {
  if (p.size() != q.size()) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(p.size()) +
                          " vs " + std::to_string(q.size()));
  }
  if constexpr (DerivedA::IsRowMajor == DerivedB::IsRowMajor) {
    return (p - q).squaredNorm();
  } else {
    return (p - q.transpose()).squaredNorm();
  }
}

/// Euclidean distance ||p - q||_2.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar Dist(const Eigen::MatrixBase<DerivedA>& p,
                               const Eigen::MatrixBase<DerivedB>& q) {
  using std::sqrt;
  return sqrt(SquaredDist(p, q));
}

/// Squared distance from `p` to the closest row of `centers`. Returns
/// +infinity for an empty center set.
template <typename DerivedP, typename DerivedC>
typename DerivedP::Scalar SquaredDistToSet(
    const Eigen::MatrixBase<DerivedP>& p,
    const Eigen::MatrixBase<DerivedC>& centers) {
  using Scalar = typename DerivedP::Scalar;
  if (centers.rows() == 0) return std::numeric_limits<Scalar>::infinity();
  if (p.size() != centers.cols()) {
    throw InvalidArgument("dimension mismatch between point and centers");
  }
  return (centers.rowwise() - p.derived().reshaped().transpose())
      .rowwise()
      .squaredNorm()
      .minCoeff();
}

}  // namespace fastkmpp

#endif  // FASTKMPP_GEOMETRY_H_
