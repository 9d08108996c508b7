#pragma once

#include <cstdint>
#include <vector>

#include "past/clustering.hpp"
#include "past/reranking.hpp"
#include "past/types.hpp"

namespace past {

// P clusters x K instances, group-major. entries[g * K + j] belongs to
// cluster_ids[g].
struct PKBatch {
  std::vector<int> entries;
  std::vector<int> cluster_ids;
  int P = 0;
  int K = 0;

  int size() const { return static_cast<int>(entries.size()); }

  // Pseudo label per entry, aligned with entries.
  IntVector entry_labels() const {
    IntVector labels(size());
    for (int g = 0; g < P; ++g)
      for (int j = 0; j < K; ++j) labels(g * K + j) = cluster_ids[g];
    return labels;
  }
};

// Triplet drawn from the ranking index: positive from ranks [1, eta],
// negative from ranks (eta, 2*eta].
struct RankedTriplet {
  int anchor = 0;
  int positive = 0;
  int negative = 0;
  int pos_rank = 0;
  int neg_rank = 0;
};

// Clusters drawn uniformly without replacement; instances without
// replacement when the cluster holds >= K members, with replacement
// otherwise. Deterministic given the seed.
PKBatch pk_sample(const PseudoLabeling& labeling, int P, int K, std::uint64_t seed);

// One triplet per batch entry, anchored on the batch entries in order.
std::vector<RankedTriplet> select_rtl_triplets(const PKBatch& batch, const RankingIndex& ranking,
                                               int eta, std::uint64_t seed);

}  // namespace past
