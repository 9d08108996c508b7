#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "past/errors.hpp"

namespace past {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

// A feature matrix is N x d, rows are samples. A distance matrix is N x N,
// symmetric with zero diagonal. Both are plain dense matrices.
using FeatureMatrix = Matrix;
using DistanceMatrix = Matrix;

struct Sample {
  int id = 0;
  std::optional<int> identity;
  std::optional<int> camera;
};

struct Dataset {
  std::vector<Sample> samples;
  FeatureMatrix features;

  int size() const { return static_cast<int>(samples.size()); }
  int dim() const { return static_cast<int>(features.cols()); }

  bool has_identities() const {
    for (const auto& s : samples)
      if (!s.identity) return false;
    return !samples.empty();
  }

  // ids must be dense 0..N-1 and row counts must agree.
  void validate() const {
    if (static_cast<Eigen::Index>(samples.size()) != features.rows())
      throw ShapeMismatch("dataset: sample count does not match feature rows");
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (samples[i].id != static_cast<int>(i))
        throw InvalidSpec("dataset: sample ids must be dense 0..N-1");
    if (!features.allFinite())
      throw InvalidSpec("dataset: features must be finite");
  }
};

}  // namespace past
