#pragma once

#include "past/rng.hpp"
#include "past/types.hpp"

namespace test_util {

inline past::Matrix random_matrix(int rows, int cols, past::Rng& rng, double scale = 1.0) {
  past::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

// Two Gaussian blobs in the plane with a wide gap.
inline past::Matrix two_blob_points(int per_blob, past::Rng& rng, double spread = 0.3,
                                    double gap = 10.0) {
  past::Matrix pts(2 * per_blob, 2);
  for (int i = 0; i < per_blob; ++i) {
    pts(i, 0) = spread * rng.normal();
    pts(i, 1) = spread * rng.normal();
    pts(per_blob + i, 0) = gap + spread * rng.normal();
    pts(per_blob + i, 1) = spread * rng.normal();
  }
  return pts;
}

// Partition equality up to a relabeling of cluster ids (noise must match
// exactly).
inline bool same_partition(const past::IntVector& a, const past::IntVector& b) {
  if (a.size() != b.size()) return false;
  std::vector<int> map_ab, map_ba;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if ((a(i) < 0) != (b(i) < 0)) return false;
    if (a(i) < 0) continue;
    if (a(i) >= static_cast<int>(map_ab.size())) map_ab.resize(a(i) + 1, -1);
    if (b(i) >= static_cast<int>(map_ba.size())) map_ba.resize(b(i) + 1, -1);
    if (map_ab[a(i)] == -1) map_ab[a(i)] = b(i);
    if (map_ba[b(i)] == -1) map_ba[b(i)] = a(i);
    if (map_ab[a(i)] != b(i) || map_ba[b(i)] != a(i)) return false;
  }
  return true;
}

}  // namespace test_util
