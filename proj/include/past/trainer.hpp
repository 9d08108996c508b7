#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "past/clustering.hpp"
#include "past/model.hpp"
#include "past/types.hpp"

namespace past {

enum class ClusteringMethod { Hdbscan, Dbscan, Kmeans };

ClusteringMethod clustering_method_from_string(const std::string& name);
std::string to_string(ClusteringMethod method);

struct StageLearningRates {
  double conservative_backbone = 1e-4;
  double conservative_embedding = 2e-4;
  double promoting_classifier = 1e-3;
  double promoting_other = 5e-5;
  int decay_after = 3;        // iterations trained at the full rate
  double decay_factor = 0.1;
};

struct ModelSpec {
  std::vector<int> hidden{64, 64};
  int embedding_dim = 32;
};

struct AdaptConfig {
  double margin = 0.3;  // m of the triplet hinges
  double lambda = 0.5;  // CTL weight in the combined conservative objective
  int eta = 20;         // positive rank window for ranking triplets
  int s_min = 10;       // HDBSCAN minimum cluster size / min samples
  int batch_p = 16;
  int batch_k = 4;
  int max_iterations = 4;
  int epochs_conservative = 2;
  int epochs_promoting = 2;
  int k1 = 20;
  int k2 = 6;
  double jaccard_blend = 0.0;
  ClusteringMethod clustering_method = ClusteringMethod::Hdbscan;
  double dbscan_eps = 0.0;  // <= 0: 90th percentile of s_min-th neighbor distances
  int kmeans_k = 0;         // <= 0: source identity count from the checkpoint
  std::uint64_t seed = 1;
  StageLearningRates lr;
  ModelSpec model;
  int pretrain_epochs = 40;
  double pretrain_lr_classifier = 0.05;
  double pretrain_lr_model = 0.02;
};

struct IterationLog {
  int iteration = 0;
  int num_clusters = 0;
  int selected = 0;  // |T_U|
  bool has_label_accuracy = false;
  double label_accuracy = 0.0;
  double selection_ratio = 0.0;
  bool has_eval = false;
  double rank1 = 0.0;
  double map_score = 0.0;
  double conservative_loss_mean = 0.0;
  double promoting_loss_mean = 0.0;
};

struct AdaptResult {
  EmbedderParams params;
  std::vector<IterationLog> logs;
};

// Supervised pretraining on the labeled source set; the classifier head is
// discarded, only the embedder is returned.
EmbedderParams pretrain_source(const Dataset& source, const AdaptConfig& config);

// Normalized embeddings for a whole dataset.
Matrix extract_features(const EmbedderParams& params, const Dataset& dataset);

// Alternating conservative/promoting self-training on the unlabeled target.
// query/gallery, when given, are used for per-iteration retrieval logging
// only; target identities, when present, feed the label-accuracy log.
AdaptResult run_past(const EmbedderParams& pretrained, const Dataset& target,
                     const AdaptConfig& config, const Dataset* query = nullptr,
                     const Dataset* gallery = nullptr);

// Convenience: pretrain on source, then adapt on target.
AdaptResult run_past(const Dataset& source, const Dataset& target, const AdaptConfig& config,
                     const Dataset* query = nullptr, const Dataset* gallery = nullptr);

}  // namespace past
