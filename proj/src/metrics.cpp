#include "past/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "past/distance.hpp"
#include "past/errors.hpp"
#include "past/trainer.hpp"

namespace past {

RetrievalResult evaluate_features(const Matrix& query_features, const std::vector<Sample>& query_samples,
                                  const Matrix& gallery_features,
                                  const std::vector<Sample>& gallery_samples,
                                  const std::vector<int>& ranks) {
  const int nq = static_cast<int>(query_samples.size());
  const int ng = static_cast<int>(gallery_samples.size());
  if (query_features.rows() != nq || gallery_features.rows() != ng)
    throw ShapeMismatch("evaluate: features do not match sample counts");
  for (const auto& s : query_samples)
    if (!s.identity) throw MissingLabels("evaluate: query sample without identity");
  for (const auto& s : gallery_samples)
    if (!s.identity) throw MissingLabels("evaluate: gallery sample without identity");

  const DistanceMatrix dist = cosine_distance(query_features, gallery_features);

  RetrievalResult result;
  std::vector<int> first_hit_rank;  // 1-based rank of the first correct match per query
  double ap_sum = 0.0;

  for (int q = 0; q < nq; ++q) {
    const int qid = *query_samples[q].identity;
    const bool q_has_cam = query_samples[q].camera.has_value();

    std::vector<int> order(ng);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (dist(q, a) != dist(q, b)) return dist(q, a) < dist(q, b);
      return a < b;
    });

    int rank = 0;
    int relevant_seen = 0;
    int first_hit = 0;
    double ap = 0.0;
    for (int g : order) {
      const auto& gs = gallery_samples[g];
      if (*gs.identity == qid && q_has_cam && gs.camera.has_value() &&
          *gs.camera == *query_samples[q].camera)
        continue;  // same identity seen by the same camera: excluded
      ++rank;
      if (*gs.identity == qid) {
        ++relevant_seen;
        ap += static_cast<double>(relevant_seen) / rank;
        if (first_hit == 0) first_hit = rank;
      }
    }
    if (relevant_seen == 0) {
      ++result.skipped_queries;
      continue;
    }
    ap_sum += ap / relevant_seen;
    first_hit_rank.push_back(first_hit);
    ++result.evaluated_queries;
  }

  if (result.evaluated_queries == 0)
    throw NoValidGallery("evaluate: no query has a valid gallery match");

  result.map_score = ap_sum / result.evaluated_queries;
  for (int r : ranks) {
    int hits = 0;
    for (int fh : first_hit_rank)
      if (fh <= r) ++hits;
    result.cmc.emplace_back(r, static_cast<double>(hits) / result.evaluated_queries);
  }
  return result;
}

RetrievalResult evaluate(const Dataset& query, const Dataset& gallery, const EmbedderParams& params,
                         const std::vector<int>& ranks) {
  const Matrix qf = extract_features(params, query);
  const Matrix gf = extract_features(params, gallery);
  return evaluate_features(qf, query.samples, gf, gallery.samples, ranks);
}

LabelQuality pseudo_label_accuracy(const PseudoLabeling& labeling, const std::vector<int>& truth) {
  if (static_cast<int>(truth.size()) != labeling.size())
    throw ShapeMismatch("pseudo_label_accuracy: truth length does not match labeling");

  // majority ground-truth identity per cluster; ties go to the smaller id
  std::vector<std::map<int, int>> votes(labeling.num_clusters);
  int clustered = 0;
  for (int i = 0; i < labeling.size(); ++i) {
    const int lbl = labeling.labels(i);
    if (lbl < 0) continue;
    ++votes[lbl][truth[i]];
    ++clustered;
  }
  if (clustered == 0) throw NoClusteredSamples("pseudo_label_accuracy: every sample is noise");

  std::vector<int> majority(labeling.num_clusters, -1);
  for (int c = 0; c < labeling.num_clusters; ++c) {
    int best_count = -1;
    for (const auto& [identity, count] : votes[c]) {
      if (count > best_count) {
        best_count = count;
        majority[c] = identity;
      }
    }
  }

  int correct = 0;
  for (int i = 0; i < labeling.size(); ++i) {
    const int lbl = labeling.labels(i);
    if (lbl >= 0 && truth[i] == majority[lbl]) ++correct;
  }

  LabelQuality quality;
  quality.accuracy = static_cast<double>(correct) / clustered;
  quality.selection_ratio = static_cast<double>(clustered) / labeling.size();
  return quality;
}

}  // namespace past
