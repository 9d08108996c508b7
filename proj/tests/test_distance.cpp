#include <doctest.h>

#include "past/distance.hpp"
#include "past/rng.hpp"
#include "test_util.hpp"

using past::Matrix;

TEST_CASE("l2_normalize scales a 3-4-5 row") {
  Matrix f(1, 2);
  f << 3.0, 4.0;
  const Matrix out = past::l2_normalize(f);
  CHECK(out(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("l2_normalize is idempotent on unit rows") {
  past::Rng rng(7);
  Matrix f = test_util::random_matrix(6, 5, rng);
  const Matrix once = past::l2_normalize(f);
  const Matrix twice = past::l2_normalize(once);
  CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("l2_normalize leaves unit row norms within 1e-6") {
  past::Rng rng(11);
  const Matrix out = past::l2_normalize(test_util::random_matrix(10, 8, rng));
  for (int i = 0; i < out.rows(); ++i) CHECK(std::abs(out.row(i).norm() - 1.0) < 1e-6);
}

TEST_CASE("l2_normalize rejects zero rows") {
  Matrix f = Matrix::Zero(2, 3);
  f(0, 0) = 1.0;
  CHECK_THROWS_AS(past::l2_normalize(f), past::ZeroVectorRow);
}

TEST_CASE("pairwise_euclidean on collinear points") {
  Matrix f(2, 1);
  f << 0.0, 3.0;
  const Matrix d = past::pairwise_euclidean(f);
  CHECK(d(0, 1) == doctest::Approx(3.0));
  CHECK(d(0, 0) == 0.0);
}

TEST_CASE("pairwise_euclidean of identical rows is zero") {
  Matrix f(2, 4);
  f.row(0) = Eigen::RowVector4d(1, 2, 3, 4);
  f.row(1) = f.row(0);
  CHECK(past::pairwise_euclidean(f)(0, 1) == 0.0);
}

TEST_CASE("pairwise_euclidean matches the naive double loop") {
  past::Rng rng(3);
  const Matrix f = test_util::random_matrix(5, 3, rng);
  const Matrix d = past::pairwise_euclidean(f);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      double acc = 0.0;
      for (int c = 0; c < 3; ++c) acc += (f(i, c) - f(j, c)) * (f(i, c) - f(j, c));
      CHECK(std::abs(d(i, j) - std::sqrt(acc)) < 1e-9);
    }
}

TEST_CASE("pairwise_euclidean is exactly symmetric") {
  past::Rng rng(5);
  const Matrix d = past::pairwise_euclidean(test_util::random_matrix(12, 6, rng));
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j) CHECK(d(i, j) == d(j, i));
}

TEST_CASE("cosine_distance endpoint values") {
  Matrix q(3, 2), g(1, 2);
  q << 2, 0, 0, 5, -1, 0;
  g << 1, 0;
  const Matrix d = past::cosine_distance(q, g);
  CHECK(d(0, 0) == doctest::Approx(0.0).epsilon(1e-12));  // parallel
  CHECK(d(1, 0) == doctest::Approx(1.0).epsilon(1e-12));  // orthogonal
  CHECK(d(2, 0) == doctest::Approx(2.0).epsilon(1e-12));  // antiparallel
}

TEST_CASE("cosine_distance rejects zero rows") {
  Matrix q = Matrix::Zero(1, 2);
  Matrix g(1, 2);
  g << 1, 0;
  CHECK_THROWS_AS(past::cosine_distance(q, g), past::ZeroVectorRow);
}

TEST_CASE("cosine equals half the squared euclidean distance on unit rows") {
  past::Rng rng(17);
  const Matrix f = past::l2_normalize(test_util::random_matrix(9, 4, rng));
  const Matrix cos = past::cosine_distance(f, f);
  const Matrix euc = past::pairwise_euclidean(f);
  for (int i = 0; i < f.rows(); ++i)
    for (int j = 0; j < f.rows(); ++j)
      CHECK(std::abs(cos(i, j) - euc(i, j) * euc(i, j) / 2.0) < 1e-9);
}
