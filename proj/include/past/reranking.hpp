#pragma once

#include <vector>

#include "past/types.hpp"

namespace past {

// Per-sample neighbor ranking. order row i is a permutation of 0..N-1 sorted
// by ascending distance to i (self first), scores row i holds the matching
// sorted distances.
struct RankingIndex {
  IndexMatrix order;
  Matrix scores;

  int size() const { return static_cast<int>(order.rows()); }
};

// Jaccard distance matrix from k-reciprocal encoding. Values in [0, 1],
// symmetric, zero diagonal.
struct JaccardMatrix {
  Matrix values;

  int size() const { return static_cast<int>(values.rows()); }
};

// Deterministic argsort of one distance-matrix row: ascending distance, the
// sample itself first, remaining ties by ascending id.
std::vector<int> argsort_row(const Matrix& matrix, int row);

// Expanded k-reciprocal neighborhood R*(i, k1). kNN(i, k) here contains k+1
// ids: the sample itself at rank 0 plus its k nearest others.
std::vector<int> k_reciprocal_set(const DistanceMatrix& dist, int i, int k1);

// Jaccard distance between the query-expanded k-reciprocal weight vectors.
// blend = 0 yields the pure Jaccard distance; blend > 0 mixes in the
// original distances rescaled to [0, 1].
JaccardMatrix jaccard_matrix(const DistanceMatrix& dist, int k1, int k2, double blend = 0.0);

// Row-wise sort of the Jaccard matrix into a RankingIndex.
RankingIndex ranking_matrix(const JaccardMatrix& jaccard);

}  // namespace past
