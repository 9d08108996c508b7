#include "past/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "past/distance.hpp"
#include "past/errors.hpp"
#include "past/losses.hpp"
#include "past/metrics.hpp"
#include "past/reranking.hpp"
#include "past/rng.hpp"
#include "past/sampling.hpp"

namespace past {

ClusteringMethod clustering_method_from_string(const std::string& name) {
  if (name == "hdbscan") return ClusteringMethod::Hdbscan;
  if (name == "dbscan") return ClusteringMethod::Dbscan;
  if (name == "kmeans") return ClusteringMethod::Kmeans;
  throw InvalidSpec("unknown clustering method: " + name);
}

std::string to_string(ClusteringMethod method) {
  switch (method) {
    case ClusteringMethod::Hdbscan: return "hdbscan";
    case ClusteringMethod::Dbscan: return "dbscan";
    case ClusteringMethod::Kmeans: return "kmeans";
  }
  return "hdbscan";
}

namespace {

constexpr std::uint64_t kPretrainStream = 0x70726574;
constexpr std::uint64_t kAdaptStream = 0x61646170;

Matrix gather_rows(const Matrix& source, const std::vector<int>& ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), source.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = source.row(ids[i]);
  return out;
}

std::vector<double> layer_rates(const EmbedderParams& params, double backbone, double embedding) {
  std::vector<double> rates(params.layers.size(), backbone);
  if (!rates.empty()) rates.back() = embedding;
  return rates;
}

// One softmax-classifier epoch over PK batches; shared by pretraining and
// the promoting stage.
double classification_epoch(EmbedderParams& params, Matrix& classifier,
                            const FeatureMatrix& inputs, const PseudoLabeling& labeling,
                            int batch_p, int batch_k, double lr_classifier, double lr_model_backbone,
                            double lr_model_embedding, OptimizerState& model_state,
                            Matrix& classifier_velocity, Rng& rng) {
  const int selected = labeling.selected_count();
  const int batch_size = batch_p * batch_k;
  const int num_batches = std::max(1, (selected + batch_size - 1) / batch_size);
  const std::vector<double> rates = layer_rates(params, lr_model_backbone, lr_model_embedding);

  double loss_sum = 0.0;
  for (int b = 0; b < num_batches; ++b) {
    const PKBatch batch = pk_sample(labeling, batch_p, batch_k, rng.next_u64());
    const Matrix x = gather_rows(inputs, batch.entries);
    ForwardCache cache;
    const Matrix raw = forward(params, x, &cache);
    const Matrix feats = rows_unit(raw);
    const Matrix logits = feats * classifier;
    const LossResult ce = softmax_ce_loss(logits, batch.entry_labels());
    loss_sum += ce.value;

    const Matrix classifier_grad = feats.transpose() * ce.grad;
    const Matrix feat_grad = ce.grad * classifier.transpose();
    const ParamGrads grads = backward(params, cache, rows_unit_backward(raw, feat_grad));
    sgd_step(params, grads, model_state, rates);
    sgd_update(classifier, classifier_velocity, classifier_grad, lr_classifier, model_state.momentum,
               model_state.weight_decay);
  }
  return loss_sum / num_batches;
}

PseudoLabeling labels_from_identities(const Dataset& dataset) {
  if (!dataset.has_identities()) throw MissingLabels("source dataset has samples without identities");
  std::vector<int> ids;
  ids.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) ids.push_back(*s.identity);
  std::vector<int> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  PseudoLabeling labeling;
  labeling.labels.resize(dataset.size());
  for (int i = 0; i < dataset.size(); ++i) {
    const int dense = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), ids[i]) -
                                       sorted.begin());
    labeling.labels(i) = dense;
  }
  labeling.num_clusters = static_cast<int>(sorted.size());
  return labeling;
}

}  // namespace

Matrix extract_features(const EmbedderParams& params, const Dataset& dataset) {
  return rows_unit(forward(params, dataset.features));
}

EmbedderParams pretrain_source(const Dataset& source, const AdaptConfig& config) {
  source.validate();
  const PseudoLabeling labeling = labels_from_identities(source);

  Rng rng(derive_seed(config.seed, kPretrainStream));
  EmbedderParams params = EmbedderParams::random(source.dim(), config.model.hidden,
                                                 config.model.embedding_dim, rng);
  params.source_identities = labeling.num_clusters;
  if (config.pretrain_epochs <= 0) return params;

  const int p = std::min(config.batch_p, labeling.num_clusters);
  if (p < 2) throw MissingLabels("pretrain_source: need at least 2 source identities");

  // classifier columns start at the per-identity mean of the initial features
  Matrix classifier = init_classifier(cluster_means(extract_features(params, source), labeling));
  Matrix classifier_velocity = Matrix::Zero(classifier.rows(), classifier.cols());
  OptimizerState state = OptimizerState::zeros_like(params);

  for (int epoch = 0; epoch < config.pretrain_epochs; ++epoch) {
    classification_epoch(params, classifier, source.features, labeling, p, config.batch_k,
                         config.pretrain_lr_classifier, config.pretrain_lr_model,
                         config.pretrain_lr_model, state, classifier_velocity, rng);
  }
  return params;  // classifier head is dropped
}

AdaptResult run_past(const EmbedderParams& pretrained, const Dataset& target,
                     const AdaptConfig& config, const Dataset* query, const Dataset* gallery) {
  target.validate();
  const int n = target.size();
  AdaptResult result;
  result.params = pretrained;
  if (config.max_iterations <= 0) return result;

  std::vector<int> truth;
  if (target.has_identities())
    for (const auto& s : target.samples) truth.push_back(*s.identity);

  Rng rng(derive_seed(config.seed, kAdaptStream));
  const int batch_size = config.batch_p * config.batch_k;

  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    const double lr_scale = iter > config.lr.decay_after ? config.lr.decay_factor : 1.0;
    IterationLog log;
    log.iteration = iter;

    // (a) embed the whole target set, (b) re-rank
    const Matrix features = extract_features(result.params, target);
    const DistanceMatrix dist = pairwise_euclidean(features);
    const int k1 = std::min(config.k1, n - 1);
    const int k2 = std::min(config.k2, k1);
    const JaccardMatrix jaccard = jaccard_matrix(dist, k1, k2, config.jaccard_blend);
    const RankingIndex ranking = ranking_matrix(jaccard);

    // (c) pseudo labels
    PseudoLabeling labeling;
    switch (config.clustering_method) {
      case ClusteringMethod::Hdbscan:
        labeling = hdbscan(jaccard.values, config.s_min);
        break;
      case ClusteringMethod::Dbscan: {
        const double eps = config.dbscan_eps > 0.0 ? config.dbscan_eps
                                                   : dbscan_eps_heuristic(ranking, config.s_min);
        labeling = dbscan(jaccard.values, eps, config.s_min);
        break;
      }
      case ClusteringMethod::Kmeans: {
        const int k = config.kmeans_k > 0 ? config.kmeans_k : result.params.source_identities;
        if (k <= 0) throw InvalidK("run_past: kmeans_k unset and checkpoint has no source identity count");
        labeling = kmeans(features, std::min(k, n), rng.next_u64());
        break;
      }
    }
    if (labeling.num_clusters < 2)
      throw EmptySelection("iteration " + std::to_string(iter) + ": clustering produced " +
                           std::to_string(labeling.num_clusters) +
                           " clusters; nothing to train on");

    log.num_clusters = labeling.num_clusters;
    log.selected = labeling.selected_count();
    if (!truth.empty()) {
      const LabelQuality quality = pseudo_label_accuracy(labeling, truth);
      log.has_label_accuracy = true;
      log.label_accuracy = quality.accuracy;
      log.selection_ratio = quality.selection_ratio;
    }

    const int p_eff = std::min(config.batch_p, labeling.num_clusters);
    const int num_batches = std::max(1, (log.selected + batch_size - 1) / batch_size);

    // (d) conservative stage: combined triplet objective on PK batches
    {
      OptimizerState state = OptimizerState::zeros_like(result.params);
      const std::vector<double> rates =
          layer_rates(result.params, config.lr.conservative_backbone * lr_scale,
                      config.lr.conservative_embedding * lr_scale);
      double loss_sum = 0.0;
      int steps = 0;
      for (int epoch = 0; epoch < config.epochs_conservative; ++epoch) {
        for (int b = 0; b < num_batches; ++b) {
          const PKBatch batch = pk_sample(labeling, p_eff, config.batch_k, rng.next_u64());
          const std::vector<RankedTriplet> triplets =
              select_rtl_triplets(batch, ranking, config.eta, rng.next_u64());

          // forward set: batch entries plus any triplet endpoints outside it
          std::vector<int> fwd_ids;
          std::unordered_map<int, int> row_of;
          auto add_id = [&](int id) {
            if (row_of.emplace(id, static_cast<int>(fwd_ids.size())).second) fwd_ids.push_back(id);
          };
          for (int id : batch.entries) add_id(id);
          for (const auto& t : triplets) {
            add_id(t.positive);
            add_id(t.negative);
          }

          ForwardCache cache;
          const Matrix raw = forward(result.params, gather_rows(target.features, fwd_ids), &cache);
          const Matrix feats = rows_unit(raw);

          std::vector<int> batch_rows;
          batch_rows.reserve(batch.entries.size());
          for (int id : batch.entries) batch_rows.push_back(row_of.at(id));
          const LossResult ctl =
              ctl_loss(gather_rows(feats, batch_rows), batch.entry_labels(), config.margin);

          std::vector<RankedTriplet> local = triplets;
          for (auto& t : local) {
            t.anchor = row_of.at(t.anchor);
            t.positive = row_of.at(t.positive);
            t.negative = row_of.at(t.negative);
          }
          const LossResult rtl = rtl_loss(feats, local, config.margin, config.eta);

          LossResult ctl_full;
          ctl_full.value = ctl.value;
          ctl_full.grad = Matrix::Zero(feats.rows(), feats.cols());
          for (std::size_t j = 0; j < batch_rows.size(); ++j)
            ctl_full.grad.row(batch_rows[j]) += ctl.grad.row(static_cast<Eigen::Index>(j));

          const LossResult combined = conservative_loss(ctl_full, rtl, config.lambda);
          loss_sum += combined.value;
          ++steps;

          const ParamGrads grads =
              backward(result.params, cache, rows_unit_backward(raw, combined.grad));
          sgd_step(result.params, grads, state, rates);
        }
      }
      log.conservative_loss_mean = steps > 0 ? loss_sum / steps : 0.0;
    }

    // (e) re-embed the selected set, (f) classifier from cluster means
    const std::vector<int> selected_ids = labeling.selected_ids();
    PseudoLabeling selected_labels;
    selected_labels.labels.resize(static_cast<Eigen::Index>(selected_ids.size()));
    for (std::size_t i = 0; i < selected_ids.size(); ++i)
      selected_labels.labels(static_cast<Eigen::Index>(i)) = labeling.labels(selected_ids[i]);
    selected_labels.num_clusters = labeling.num_clusters;

    const Matrix features_u =
        rows_unit(forward(result.params, gather_rows(target.features, selected_ids)));
    Matrix classifier = init_classifier(cluster_means(features_u, selected_labels));

    // (g) promoting stage: softmax over the current clusters
    {
      OptimizerState state = OptimizerState::zeros_like(result.params);
      Matrix classifier_velocity = Matrix::Zero(classifier.rows(), classifier.cols());
      double loss_sum = 0.0;
      for (int epoch = 0; epoch < config.epochs_promoting; ++epoch) {
        loss_sum += classification_epoch(
            result.params, classifier, target.features, labeling, p_eff, config.batch_k,
            config.lr.promoting_classifier * lr_scale, config.lr.promoting_other * lr_scale,
            config.lr.promoting_other * lr_scale, state, classifier_velocity, rng);
      }
      log.promoting_loss_mean =
          config.epochs_promoting > 0 ? loss_sum / config.epochs_promoting : 0.0;
    }

    if (query && gallery) {
      const RetrievalResult eval = evaluate(*query, *gallery, result.params, {1, 5, 10});
      log.has_eval = true;
      log.rank1 = eval.rank1();
      log.map_score = eval.map_score;
    }
    result.logs.push_back(log);
  }
  return result;
}

AdaptResult run_past(const Dataset& source, const Dataset& target, const AdaptConfig& config,
                     const Dataset* query, const Dataset* gallery) {
  const EmbedderParams pretrained = pretrain_source(source, config);
  return run_past(pretrained, target, config, query, gallery);
}

}  // namespace past
