#pragma once

#include <vector>

#include "past/clustering.hpp"
#include "past/model.hpp"
#include "past/types.hpp"

namespace past {

struct RetrievalResult {
  std::vector<std::pair<int, double>> cmc;  // (rank, probability), ranks as requested
  double map_score = 0.0;
  int evaluated_queries = 0;
  int skipped_queries = 0;  // queries with no valid gallery match

  double rank1() const {
    for (const auto& [r, v] : cmc)
      if (r == 1) return v;
    return 0.0;
  }
};

// Cosine-distance retrieval. Gallery entries sharing both identity and
// camera with the query are excluded when camera tags are present on both
// sides (single-shot protocol). Ties break by ascending gallery id.
RetrievalResult evaluate_features(const Matrix& query_features, const std::vector<Sample>& query_samples,
                                  const Matrix& gallery_features,
                                  const std::vector<Sample>& gallery_samples,
                                  const std::vector<int>& ranks);

// Extracts normalized embeddings with the given params, then ranks.
RetrievalResult evaluate(const Dataset& query, const Dataset& gallery, const EmbedderParams& params,
                         const std::vector<int>& ranks);

struct LabelQuality {
  double accuracy = 0.0;        // majority-identity agreement over clustered samples
  double selection_ratio = 0.0;  // |T_U| / N
};

LabelQuality pseudo_label_accuracy(const PseudoLabeling& labeling, const std::vector<int>& truth);

}  // namespace past
