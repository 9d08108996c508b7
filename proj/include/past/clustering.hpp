#pragma once

#include <cstdint>
#include <vector>

#include "past/types.hpp"

namespace past {

// Cluster assignment per sample; -1 marks noise. Cluster ids are dense
// 0..num_clusters-1 and every cluster is non-empty.
struct PseudoLabeling {
  IntVector labels;
  int num_clusters = 0;

  int size() const { return static_cast<int>(labels.size()); }

  int selected_count() const {
    int c = 0;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels(i) >= 0) ++c;
    return c;
  }

  // Ids of the non-noise samples, ascending.
  std::vector<int> selected_ids() const {
    std::vector<int> ids;
    for (Eigen::Index i = 0; i < labels.size(); ++i)
      if (labels(i) >= 0) ids.push_back(static_cast<int>(i));
    return ids;
  }
};

// Internals of one hdbscan run, exposed for verification.
struct HdbscanResult {
  struct Merge {
    int left = 0;   // dendrogram node id (< N: point, >= N: earlier merge)
    int right = 0;
    double distance = 0.0;
    int size = 0;
  };
  struct CondensedEdge {
    int parent = 0;      // condensed cluster id
    int child = 0;       // point id if child_is_point, else condensed cluster id
    bool child_is_point = false;
    double lambda = 0.0;  // 1 / distance at which the child departs
    int size = 0;
  };
  struct ClusterInfo {
    int id = 0;
    int parent = -1;          // condensed parent cluster, -1 for the root
    int birth_node = -1;      // dendrogram node where the cluster begins
    double birth_lambda = 0.0;
    double stability = 0.0;
    bool selected = false;
  };

  Vector core_distances;
  std::vector<Merge> dendrogram;         // single-linkage over mutual reachability
  std::vector<CondensedEdge> condensed;  // condensed tree, min cluster size s_min
  std::vector<ClusterInfo> clusters;     // indexed by condensed cluster id
  PseudoLabeling labeling;
};

// Hierarchical density clustering on a precomputed distance matrix.
// s_min doubles as min_samples (core distance rank, self included) and as
// the minimum cluster size; clusters are extracted by excess-of-mass
// stability and the root is never selected.
HdbscanResult hdbscan_full(const DistanceMatrix& dist, int s_min);
PseudoLabeling hdbscan(const DistanceMatrix& dist, int s_min);

// Classic density reachability on a precomputed matrix (closed eps-ball,
// the point itself counts towards min_samples).
PseudoLabeling dbscan(const DistanceMatrix& dist, double eps, int min_samples);

struct RankingIndex;  // reranking.hpp

// Default dbscan eps: 90th percentile of the per-sample distance to the
// s_min-th neighbor.
double dbscan_eps_heuristic(const RankingIndex& ranking, int s_min);

struct KmeansResult {
  PseudoLabeling labeling;
  Matrix centroids;                  // k x d
  std::vector<double> inertia_trace;  // after each assignment step
};

// Lloyd's algorithm with k-means++ seeding; every sample is assigned.
KmeansResult kmeans_full(const FeatureMatrix& features, int k, std::uint64_t seed);
PseudoLabeling kmeans(const FeatureMatrix& features, int k, std::uint64_t seed);

// Row c = mean of the feature rows labeled c; noise rows are ignored.
Matrix cluster_means(const FeatureMatrix& features, const PseudoLabeling& labeling);

}  // namespace past
