#pragma once

// Straight-line reference implementations used to cross-check the library.
// Everything here favors clarity over speed and stays independent of the
// code paths under test.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "past/types.hpp"

namespace oracle {

inline std::vector<int> sorted_row_ids(const past::Matrix& dist, int i) {
  std::vector<int> ids(dist.cols());
  std::iota(ids.begin(), ids.end(), 0);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (dist(i, a) != dist(i, b)) return dist(i, a) < dist(i, b);
    if (a == i || b == i) return a == i;
    return a < b;
  });
  return ids;
}

// kNN as a set: the sample itself plus its k nearest others.
inline std::set<int> knn(const past::Matrix& dist, int i, int k) {
  const std::vector<int> ids = sorted_row_ids(dist, i);
  return std::set<int>(ids.begin(), ids.begin() + k + 1);
}

inline std::set<int> reciprocal(const past::Matrix& dist, int i, int k) {
  std::set<int> out;
  for (int j : knn(dist, i, k)) {
    if (knn(dist, j, k).count(i)) out.insert(j);
  }
  return out;
}

inline std::set<int> expanded_reciprocal(const past::Matrix& dist, int i, int k1) {
  const std::set<int> base = reciprocal(dist, i, k1);
  std::set<int> out = base;
  const int half = (k1 + 1) / 2;
  for (int q : base) {
    const std::set<int> rq = reciprocal(dist, q, half);
    std::size_t overlap = 0;
    for (int x : rq)
      if (base.count(x)) ++overlap;
    if (3 * overlap >= 2 * rq.size()) out.insert(rq.begin(), rq.end());
  }
  return out;
}

// Fuzzy Jaccard with explicit min/max sums over every coordinate.
inline past::Matrix fuzzy_jaccard(const past::Matrix& dist, int k1, int k2) {
  const int n = static_cast<int>(dist.rows());
  past::Matrix v = past::Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : expanded_reciprocal(dist, i, k1)) v(i, j) = std::exp(-dist(i, j));

  past::Matrix vq = past::Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const std::vector<int> ids = sorted_row_ids(dist, i);
    for (int r = 0; r <= k2; ++r) vq.row(i) += v.row(ids[r]);
    vq.row(i) /= static_cast<double>(k2 + 1);
  }

  past::Matrix jac(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double min_sum = 0.0, max_sum = 0.0;
      for (int m = 0; m < n; ++m) {
        min_sum += std::min(vq(i, m), vq(j, m));
        max_sum += std::max(vq(i, m), vq(j, m));
      }
      jac(i, j) = max_sum > 0.0 ? 1.0 - min_sum / max_sum : 1.0;
    }
  }
  return jac;
}

// Average precision by scanning the ranked list of (distance, id) pairs.
inline double average_precision(const std::vector<double>& distances,
                                const std::vector<bool>& relevant) {
  std::vector<int> order(distances.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (distances[a] != distances[b]) return distances[a] < distances[b];
    return a < b;
  });
  int seen = 0;
  double ap = 0.0;
  for (std::size_t rank = 1; rank <= order.size(); ++rank) {
    if (relevant[order[rank - 1]]) {
      ++seen;
      ap += static_cast<double>(seen) / static_cast<double>(rank);
    }
  }
  return seen > 0 ? ap / seen : 0.0;
}

}  // namespace oracle
