#include "past/sampling.hpp"

#include "past/errors.hpp"
#include "past/rng.hpp"

namespace past {

PKBatch pk_sample(const PseudoLabeling& labeling, int P, int K, std::uint64_t seed) {
  if (P < 1) throw NotEnoughClusters("pk_sample: P must be >= 1");
  if (K < 2) throw DegenerateBatch("pk_sample: K must be >= 2");
  if (labeling.num_clusters < P)
    throw NotEnoughClusters("pk_sample: only " + std::to_string(labeling.num_clusters) +
                            " clusters for P=" + std::to_string(P));

  std::vector<std::vector<int>> members(labeling.num_clusters);
  for (int i = 0; i < labeling.size(); ++i) {
    const int lbl = labeling.labels(i);
    if (lbl >= 0) members[lbl].push_back(i);
  }

  Rng rng(seed);
  PKBatch batch;
  batch.P = P;
  batch.K = K;
  batch.cluster_ids = rng.choose(labeling.num_clusters, P);
  batch.entries.reserve(static_cast<std::size_t>(P) * K);
  for (int cluster : batch.cluster_ids) {
    const auto& pool = members[cluster];
    const int n = static_cast<int>(pool.size());
    if (n >= K) {
      for (int idx : rng.choose(n, K)) batch.entries.push_back(pool[idx]);
    } else {
      for (int j = 0; j < K; ++j) batch.entries.push_back(pool[rng.next_int(n)]);
    }
  }
  return batch;
}

std::vector<RankedTriplet> select_rtl_triplets(const PKBatch& batch, const RankingIndex& ranking,
                                               int eta, std::uint64_t seed) {
  const int n = ranking.size();
  if (eta < 1 || 2 * eta >= n)
    throw EtaTooLarge("select_rtl_triplets: need 1 <= eta and 2*eta < N");

  Rng rng(seed);
  std::vector<RankedTriplet> triplets;
  triplets.reserve(batch.entries.size());
  for (int anchor : batch.entries) {
    RankedTriplet t;
    t.anchor = anchor;
    t.pos_rank = 1 + rng.next_int(eta);        // [1, eta]; rank 0 is the anchor
    t.neg_rank = eta + 1 + rng.next_int(eta);  // (eta, 2*eta]
    t.positive = ranking.order(anchor, t.pos_rank);
    t.negative = ranking.order(anchor, t.neg_rank);
    triplets.push_back(t);
  }
  return triplets;
}

}  // namespace past
