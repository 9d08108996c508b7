#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "past/distance.hpp"
#include "past/reranking.hpp"
#include "past/rng.hpp"
#include "test_util.hpp"

using past::Matrix;

TEST_CASE("k_reciprocal_set of a mutual pair contains both ids") {
  Matrix f(2, 1);
  f << 0.0, 1.0;
  const Matrix dist = past::pairwise_euclidean(f);
  for (int i = 0; i < 2; ++i) {
    const std::vector<int> set = past::k_reciprocal_set(dist, i, 1);
    CHECK(set == std::vector<int>{0, 1});
  }
}

TEST_CASE("k_reciprocal_set: outlier far from a tight cluster stays alone") {
  past::Rng rng(23);
  Matrix f(10, 2);
  for (int i = 0; i < 9; ++i) {
    f(i, 0) = 0.1 * rng.normal();
    f(i, 1) = 0.1 * rng.normal();
  }
  f(9, 0) = 100.0;
  f(9, 1) = 0.0;
  const Matrix dist = past::pairwise_euclidean(f);
  const std::vector<int> set = past::k_reciprocal_set(dist, 9, 2);
  CHECK(set == std::vector<int>{9});
}

TEST_CASE("k_reciprocal_set matches the brute-force oracle and respects blobs") {
  past::Rng rng(31);
  const Matrix f = test_util::two_blob_points(5, rng);
  const Matrix dist = past::pairwise_euclidean(f);
  for (int i = 0; i < 10; ++i) {
    const std::vector<int> got = past::k_reciprocal_set(dist, i, 3);
    const std::set<int> expected = oracle::expanded_reciprocal(dist, i, 3);
    CHECK(std::set<int>(got.begin(), got.end()) == expected);
    const bool anchor_left = i < 5;
    for (int j : got) CHECK((j < 5) == anchor_left);  // never straddles the gap
  }
}

TEST_CASE("k_reciprocal_set validates k1") {
  const Matrix dist = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(past::k_reciprocal_set(dist, 0, 0), past::InvalidK);
  CHECK_THROWS_AS(past::k_reciprocal_set(dist, 0, 3), past::InvalidK);
}

TEST_CASE("jaccard_matrix: identical points have distance 0") {
  Matrix f(4, 1);
  f << 0.0, 0.0, 5.0, 9.0;
  const past::JaccardMatrix jac = past::jaccard_matrix(past::pairwise_euclidean(f), 2, 1);
  CHECK(jac.values(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("jaccard_matrix: disjoint supports have distance 1") {
  Matrix f(4, 1);
  f << 0.0, 0.1, 50.0, 50.1;
  const past::JaccardMatrix jac = past::jaccard_matrix(past::pairwise_euclidean(f), 1, 1);
  CHECK(jac.values(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(jac.values(1, 3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("jaccard_matrix matches the naive fuzzy-Jaccard oracle") {
  past::Rng rng(41);
  const Matrix f = test_util::random_matrix(8, 3, rng);
  const Matrix dist = past::pairwise_euclidean(f);
  const past::JaccardMatrix jac = past::jaccard_matrix(dist, 4, 2);
  const Matrix expected = oracle::fuzzy_jaccard(dist, 4, 2);
  CHECK((jac.values - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("jaccard_matrix is symmetric, in [0,1], zero on the diagonal") {
  past::Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6 + trial;
    const Matrix dist = past::pairwise_euclidean(test_util::random_matrix(n, 4, rng));
    const past::JaccardMatrix jac = past::jaccard_matrix(dist, std::min(5, n - 1), 2);
    for (int i = 0; i < n; ++i) {
      CHECK(jac.values(i, i) == 0.0);
      for (int j = 0; j < n; ++j) {
        CHECK(std::abs(jac.values(i, j) - jac.values(j, i)) < 1e-9);
        CHECK(jac.values(i, j) >= 0.0);
        CHECK(jac.values(i, j) <= 1.0);
      }
    }
  }
}

TEST_CASE("jaccard_matrix blend knob mixes in the rescaled input distance") {
  past::Rng rng(47);
  const Matrix dist = past::pairwise_euclidean(test_util::random_matrix(7, 3, rng));
  const Matrix pure = past::jaccard_matrix(dist, 3, 2, 0.0).values;
  const Matrix original = past::jaccard_matrix(dist, 3, 2, 1.0).values;
  const Matrix half = past::jaccard_matrix(dist, 3, 2, 0.5).values;
  CHECK((original - Matrix(dist / dist.maxCoeff())).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((half - Matrix(0.5 * pure + 0.5 * original)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("jaccard_matrix validates k parameters") {
  const Matrix dist = Matrix::Zero(5, 5);
  CHECK_THROWS_AS(past::jaccard_matrix(dist, 5, 2), past::InvalidK);
  CHECK_THROWS_AS(past::jaccard_matrix(dist, 3, 4), past::InvalidK);
  CHECK_THROWS_AS(past::jaccard_matrix(dist, 3, 0), past::InvalidK);
}

TEST_CASE("ranking_matrix puts self first and breaks ties by id") {
  Matrix values(3, 3);
  values << 0.0, 0.5, 0.5,  //
      0.5, 0.0, 0.2,        //
      0.5, 0.2, 0.0;
  const past::RankingIndex index = past::ranking_matrix(past::JaccardMatrix{values});
  for (int i = 0; i < 3; ++i) {
    CHECK(index.order(i, 0) == i);
    CHECK(index.scores(i, 0) == 0.0);
  }
  // row 0 ties at 0.5: ids ascending
  CHECK(index.order(0, 1) == 1);
  CHECK(index.order(0, 2) == 2);
}

TEST_CASE("ranking_matrix rows equal an argsort oracle and keep the row multiset") {
  past::Rng rng(53);
  Matrix values = test_util::random_matrix(6, 6, rng).cwiseAbs();
  values = ((values + values.transpose()) / 2.0).eval();
  values.diagonal().setZero();
  const past::RankingIndex index = past::ranking_matrix(past::JaccardMatrix{values});
  for (int i = 0; i < 6; ++i) {
    std::vector<int> expected = oracle::sorted_row_ids(values, i);
    for (int r = 0; r < 6; ++r) CHECK(index.order(i, r) == expected[r]);

    std::vector<double> sorted_row;
    for (int j = 0; j < 6; ++j) sorted_row.push_back(values(i, j));
    std::sort(sorted_row.begin(), sorted_row.end());
    for (int r = 0; r < 6; ++r) CHECK(index.scores(i, r) == sorted_row[r]);
    for (int r = 1; r < 6; ++r) CHECK(index.scores(i, r) >= index.scores(i, r - 1));
  }
}
