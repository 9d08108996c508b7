#pragma once

#include <span>

#include "past/sampling.hpp"
#include "past/types.hpp"

namespace past {

// Loss value with its gradient. grad is B x d (w.r.t. features) for the
// triplet losses and B x C (w.r.t. logits) for softmax cross-entropy.
struct LossResult {
  double value = 0.0;
  Matrix grad;
};

// Batch-hard triplet loss over a PK batch: per anchor, the farthest
// same-label sample and the nearest different-label sample form the triplet.
// Loss is summed over anchors, not averaged.
LossResult ctl_loss(const Matrix& batch_features, const IntVector& batch_labels, double margin);

// Ranking triplet loss with a soft margin |P_p - P_n| / eta * m. Triplet
// ids index rows of batch_features.
LossResult rtl_loss(const Matrix& batch_features, std::span<const RankedTriplet> triplets,
                    double margin, int eta);

// Combined conservative objective: rtl + lambda * ctl.
LossResult conservative_loss(const LossResult& ctl, const LossResult& rtl, double lambda);

// Softmax cross-entropy, summed over the batch, stabilized by
// max-subtraction. grad = softmax - one_hot per row.
LossResult softmax_ce_loss(const Matrix& logits, const IntVector& labels);

// Classifier columns from cluster mean features: W (d x C) with
// W.col(c) = means.row(c).
Matrix init_classifier(const Matrix& cluster_mean_rows);

}  // namespace past
