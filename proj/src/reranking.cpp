#include "past/reranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "past/errors.hpp"

namespace past {

std::vector<int> argsort_row(const Matrix& matrix, int row) {
  std::vector<int> ids(matrix.cols());
  std::iota(ids.begin(), ids.end(), 0);
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (matrix(row, a) != matrix(row, b)) return matrix(row, a) < matrix(row, b);
    // self wins any tie so that order[i][0] == i even with duplicate points
    if (a == row || b == row) return a == row;
    return a < b;
  });
  return ids;
}

namespace {

// kNN(i, k): self plus the k nearest others, as a sorted id list.
std::vector<int> knn_ids(const DistanceMatrix& dist, int i, int k) {
  std::vector<int> order = argsort_row(dist, i);
  order.resize(static_cast<std::size_t>(k) + 1);
  std::sort(order.begin(), order.end());
  return order;
}

bool contains(const std::vector<int>& sorted_ids, int x) {
  return std::binary_search(sorted_ids.begin(), sorted_ids.end(), x);
}

// R(i, k) = { j in kNN(i,k) : i in kNN(j,k) }.
std::vector<int> reciprocal_set(const DistanceMatrix& dist, int i, int k) {
  std::vector<int> result;
  for (int j : knn_ids(dist, i, k)) {
    if (contains(knn_ids(dist, j, k), i)) result.push_back(j);
  }
  return result;  // sorted; always contains i
}

}  // namespace

std::vector<int> k_reciprocal_set(const DistanceMatrix& dist, int i, int k1) {
  const int n = static_cast<int>(dist.rows());
  if (k1 <= 0 || k1 >= n) throw InvalidK("k_reciprocal_set: need 0 < k1 < N");

  std::vector<int> base = reciprocal_set(dist, i, k1);
  const int half = (k1 + 1) / 2;

  std::vector<int> expanded = base;
  for (int q : base) {
    std::vector<int> rq = reciprocal_set(dist, q, half);
    std::size_t overlap = 0;
    for (int x : rq)
      if (contains(base, x)) ++overlap;
    if (3 * overlap >= 2 * rq.size()) expanded.insert(expanded.end(), rq.begin(), rq.end());
  }
  std::sort(expanded.begin(), expanded.end());
  expanded.erase(std::unique(expanded.begin(), expanded.end()), expanded.end());
  return expanded;
}

JaccardMatrix jaccard_matrix(const DistanceMatrix& dist, int k1, int k2, double blend) {
  const int n = static_cast<int>(dist.rows());
  if (k1 <= 0 || k1 >= n || k2 <= 0 || k2 > k1) throw InvalidK("jaccard_matrix: need 0 < k2 <= k1 < N");

  // Gaussian-weighted membership of the expanded reciprocal sets.
  Matrix v = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j : k_reciprocal_set(dist, i, k1)) v(i, j) = std::exp(-dist(i, j));
  }

  // Local query expansion: average each row with its k2 nearest neighbors.
  Matrix vq = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> order = argsort_row(dist, i);
    for (int r = 0; r <= k2; ++r) vq.row(i) += v.row(order[r]);
    vq.row(i) /= static_cast<double>(k2 + 1);
  }

  const Vector row_sum = vq.rowwise().sum();
  Matrix jac = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double min_sum = vq.row(i).cwiseMin(vq.row(j)).sum();
      const double max_sum = row_sum(i) + row_sum(j) - min_sum;
      const double d = max_sum > 0.0 ? 1.0 - min_sum / max_sum : 1.0;
      jac(i, j) = std::clamp(d, 0.0, 1.0);
      jac(j, i) = jac(i, j);
    }
  }

  if (blend > 0.0) {
    const double dmax = dist.maxCoeff();
    Matrix scaled = dmax > 0.0 ? Matrix(dist / dmax) : Matrix(Matrix::Zero(n, n));
    jac = (1.0 - blend) * jac + blend * scaled;
  }
  return JaccardMatrix{std::move(jac)};
}

RankingIndex ranking_matrix(const JaccardMatrix& jaccard) {
  const int n = jaccard.size();
  RankingIndex index;
  index.order.resize(n, n);
  index.scores.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const std::vector<int> ids = argsort_row(jaccard.values, i);
    for (int r = 0; r < n; ++r) {
      index.order(i, r) = ids[r];
      index.scores(i, r) = jaccard.values(i, ids[r]);
    }
  }
  return index;
}

}  // namespace past
