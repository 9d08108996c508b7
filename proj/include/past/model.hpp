#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "past/rng.hpp"
#include "past/types.hpp"

namespace past {

struct LinearLayer {
  Matrix weight;  // fan_in x fan_out, features are rows
  Vector bias;
};

enum class ParamGroup { Backbone, Embedding, Classifier };

// Feed-forward embedder: rectified hidden layers, linear output projection.
// All hidden layers belong to the `backbone` group, the final projection to
// the `embedding` group.
struct EmbedderParams {
  std::vector<LinearLayer> layers;
  int source_identities = 0;  // carried as checkpoint metadata

  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.rows()); }
  int embedding_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.cols()); }

  ParamGroup group_of(std::size_t layer) const {
    return layer + 1 == layers.size() ? ParamGroup::Embedding : ParamGroup::Backbone;
  }

  // He-style initialization, deterministic for a given rng state.
  static EmbedderParams random(int input_dim, const std::vector<int>& hidden, int embedding_dim,
                               Rng& rng);
};

struct ParamGrads {
  std::vector<LinearLayer> layers;
};

struct ForwardCache {
  Matrix input;
  std::vector<Matrix> pre_activations;   // per layer, before the rectifier
  std::vector<Matrix> activations;       // per layer, after the rectifier
  std::vector<std::pair<int, int>> layer_shapes;
};

// Deterministic forward pass; fills cache when given one.
Matrix forward(const EmbedderParams& params, const Matrix& inputs, ForwardCache* cache = nullptr);

// Exact chain-rule gradients for the cached forward pass.
ParamGrads backward(const EmbedderParams& params, const ForwardCache& cache,
                    const Matrix& output_grad);

// v <- momentum*v + (g + weight_decay*w); w <- w - lr*v
template <typename ParamT>
void sgd_update(ParamT& param, ParamT& velocity, const ParamT& grad, double lr, double momentum,
                double weight_decay) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols())
    throw ShapeMismatch("sgd_update: grad shape does not match param");
  velocity = momentum * velocity + (grad + weight_decay * param);
  param -= lr * velocity;
}

struct OptimizerState {
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::vector<LinearLayer> velocity;

  static OptimizerState zeros_like(const EmbedderParams& params);
};

// One momentum-SGD step over all layers; lr_per_layer aligns with
// params.layers.
void sgd_step(EmbedderParams& params, const ParamGrads& grads, OptimizerState& state,
              const std::vector<double>& lr_per_layer);

// Row normalization used on embedder outputs before losses and retrieval.
Matrix rows_unit(const Matrix& raw);
// Gradient of (loss o rows_unit) w.r.t. raw, given the gradient w.r.t. the
// unit rows.
Matrix rows_unit_backward(const Matrix& raw, const Matrix& unit_grad);

// Text checkpoint, versioned, exact round-trip (shortest exact decimal).
void save_checkpoint(const std::string& path, const EmbedderParams& params);
EmbedderParams load_checkpoint(const std::string& path);

}  // namespace past
