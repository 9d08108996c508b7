#include "past/model.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "past/errors.hpp"

namespace past {

EmbedderParams EmbedderParams::random(int input_dim, const std::vector<int>& hidden,
                                      int embedding_dim, Rng& rng) {
  EmbedderParams params;
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(embedding_dim);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    LinearLayer layer;
    layer.weight.resize(dims[l], dims[l + 1]);
    const double scale = std::sqrt(2.0 / dims[l]);
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
        layer.weight(i, j) = scale * rng.normal();
    layer.bias = Vector::Zero(dims[l + 1]);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

Matrix forward(const EmbedderParams& params, const Matrix& inputs, ForwardCache* cache) {
  if (params.layers.empty()) throw ShapeMismatch("forward: model has no layers");
  if (inputs.cols() != params.layers.front().weight.rows())
    throw ShapeMismatch("forward: input dim " + std::to_string(inputs.cols()) + " vs model " +
                        std::to_string(params.layers.front().weight.rows()));

  if (cache) {
    cache->input = inputs;
    cache->pre_activations.clear();
    cache->activations.clear();
    cache->layer_shapes.clear();
    for (const auto& l : params.layers)
      cache->layer_shapes.emplace_back(static_cast<int>(l.weight.rows()),
                                       static_cast<int>(l.weight.cols()));
  }

  Matrix x = inputs;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    Matrix z = (x * params.layers[l].weight).rowwise() + params.layers[l].bias.transpose();
    if (cache) cache->pre_activations.push_back(z);
    if (l + 1 < params.layers.size()) z = z.cwiseMax(0.0);  // rectifier on hidden layers
    if (cache) cache->activations.push_back(z);
    x = std::move(z);
  }
  return x;
}

ParamGrads backward(const EmbedderParams& params, const ForwardCache& cache,
                    const Matrix& output_grad) {
  const std::size_t num_layers = params.layers.size();
  if (cache.layer_shapes.size() != num_layers)
    throw StaleCache("backward: cache layer count does not match params");
  for (std::size_t l = 0; l < num_layers; ++l) {
    if (cache.layer_shapes[l].first != params.layers[l].weight.rows() ||
        cache.layer_shapes[l].second != params.layers[l].weight.cols())
      throw StaleCache("backward: cache shape mismatch at layer " + std::to_string(l));
  }
  if (output_grad.rows() != cache.input.rows() ||
      output_grad.cols() != params.layers.back().weight.cols())
    throw ShapeMismatch("backward: output gradient shape");

  ParamGrads grads;
  grads.layers.resize(num_layers);
  Matrix g = output_grad;
  for (std::size_t l = num_layers; l-- > 0;) {
    const Matrix& below = l == 0 ? cache.input : cache.activations[l - 1];
    grads.layers[l].weight = below.transpose() * g;
    grads.layers[l].bias = g.colwise().sum().transpose();
    if (l > 0) {
      g = g * params.layers[l].weight.transpose();
      g = (cache.pre_activations[l - 1].array() > 0.0).select(g, 0.0);
    }
  }
  return grads;
}

OptimizerState OptimizerState::zeros_like(const EmbedderParams& params) {
  OptimizerState state;
  for (const auto& l : params.layers) {
    LinearLayer v;
    v.weight = Matrix::Zero(l.weight.rows(), l.weight.cols());
    v.bias = Vector::Zero(l.bias.size());
    state.velocity.push_back(std::move(v));
  }
  return state;
}

void sgd_step(EmbedderParams& params, const ParamGrads& grads, OptimizerState& state,
              const std::vector<double>& lr_per_layer) {
  if (grads.layers.size() != params.layers.size() || lr_per_layer.size() != params.layers.size() ||
      state.velocity.size() != params.layers.size())
    throw ShapeMismatch("sgd_step: layer counts disagree");
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    sgd_update(params.layers[l].weight, state.velocity[l].weight, grads.layers[l].weight,
               lr_per_layer[l], state.momentum, state.weight_decay);
    sgd_update(params.layers[l].bias, state.velocity[l].bias, grads.layers[l].bias,
               lr_per_layer[l], state.momentum, state.weight_decay);
  }
}

Matrix rows_unit(const Matrix& raw) {
  Matrix out = raw;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm < 1e-12) throw ZeroVectorRow("rows_unit: row " + std::to_string(i));
    out.row(i) /= norm;
  }
  return out;
}

Matrix rows_unit_backward(const Matrix& raw, const Matrix& unit_grad) {
  if (raw.rows() != unit_grad.rows() || raw.cols() != unit_grad.cols())
    throw ShapeMismatch("rows_unit_backward: shapes differ");
  Matrix out(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const double norm = raw.row(i).norm();
    if (norm < 1e-12) throw ZeroVectorRow("rows_unit_backward: row " + std::to_string(i));
    const Eigen::RowVectorXd unit = raw.row(i) / norm;
    out.row(i) = (unit_grad.row(i) - unit_grad.row(i).dot(unit) * unit) / norm;
  }
  return out;
}

namespace {

void write_value_line(std::FILE* f, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j)
    std::fprintf(f, j == 0 ? "%.17g" : " %.17g", row(j));
  std::fputc('\n', f);
}

}  // namespace

void save_checkpoint(const std::string& path, const EmbedderParams& params) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open checkpoint for writing: " + path);
  std::fprintf(f, "embedder-checkpoint v1\n");
  std::fprintf(f, "source_identities %d\n", params.source_identities);
  std::fprintf(f, "layers %zu\n", params.layers.size());
  for (const auto& l : params.layers) {
    std::fprintf(f, "layer %" PRId64 " %" PRId64 "\n", static_cast<std::int64_t>(l.weight.rows()),
                 static_cast<std::int64_t>(l.weight.cols()));
    for (Eigen::Index i = 0; i < l.weight.rows(); ++i) write_value_line(f, l.weight.row(i));
    write_value_line(f, l.bias.transpose());
  }
  std::fclose(f);
}

EmbedderParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "embedder-checkpoint" || version != "v1")
    throw IoError("unrecognized checkpoint header in " + path);

  EmbedderParams params;
  std::string key;
  std::size_t num_layers = 0;
  in >> key >> params.source_identities;
  if (key != "source_identities") throw IoError("malformed checkpoint: " + path);
  in >> key >> num_layers;
  if (key != "layers") throw IoError("malformed checkpoint: " + path);
  for (std::size_t l = 0; l < num_layers; ++l) {
    std::int64_t rows = 0, cols = 0;
    in >> key >> rows >> cols;
    if (key != "layer" || rows <= 0 || cols <= 0) throw IoError("malformed checkpoint: " + path);
    LinearLayer layer;
    layer.weight.resize(rows, cols);
    for (std::int64_t i = 0; i < rows; ++i)
      for (std::int64_t j = 0; j < cols; ++j) in >> layer.weight(i, j);
    layer.bias.resize(cols);
    for (std::int64_t j = 0; j < cols; ++j) in >> layer.bias(j);
    if (!in) throw IoError("truncated checkpoint: " + path);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

}  // namespace past
