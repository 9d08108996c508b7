#pragma once

#include <Eigen/Dense>

#include "past/errors.hpp"
#include "past/types.hpp"

namespace past {

// Row-wise L2 normalization. Throws ZeroVectorRow for any row with norm
// below 1e-12.
template <typename Derived>
Matrix l2_normalize(const Eigen::MatrixBase<Derived>& features) {
  Matrix out = features.template cast<double>();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm < 1e-12) throw ZeroVectorRow("l2_normalize: row " + std::to_string(i) + " has near-zero norm");
    out.row(i) /= norm;
  }
  return out;
}

// Dense N x N Euclidean distances. Upper triangle is computed explicitly and
// mirrored, so the result is exactly symmetric with an exactly zero diagonal.
template <typename Derived>
DistanceMatrix pairwise_euclidean(const Eigen::MatrixBase<Derived>& features) {
  const Eigen::Index n = features.rows();
  DistanceMatrix dist = DistanceMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (features.row(i) - features.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

// Cosine distance 1 - cos(q, g) in [0, 2]. Rows are normalized internally;
// zero rows are rejected.
template <typename DerivedQ, typename DerivedG>
DistanceMatrix cosine_distance(const Eigen::MatrixBase<DerivedQ>& query,
                               const Eigen::MatrixBase<DerivedG>& gallery) {
  const Matrix q = l2_normalize(query);
  const Matrix g = l2_normalize(gallery);
  DistanceMatrix dist = (-(q * g.transpose())).array() + 1.0;
  return dist.cwiseMax(0.0).cwiseMin(2.0);
}

}  // namespace past
