#include "past/losses.hpp"

#include <cmath>

#include "past/distance.hpp"
#include "past/errors.hpp"

namespace past {

namespace {

// d ||a - b|| accumulated into the rows of grad; zero at coincident points.
void add_distance_grad(Matrix& grad, const Matrix& feats, int a, int b, double scale) {
  const double d = (feats.row(a) - feats.row(b)).norm();
  if (d <= 0.0) return;
  const Eigen::RowVectorXd g = scale / d * (feats.row(a) - feats.row(b));
  grad.row(a) += g;
  grad.row(b) -= g;
}

}  // namespace

LossResult ctl_loss(const Matrix& batch_features, const IntVector& batch_labels, double margin) {
  const int b = static_cast<int>(batch_features.rows());
  if (batch_labels.size() != b) throw ShapeMismatch("ctl_loss: labels do not match batch rows");
  if (margin < 0.0) throw DegenerateBatch("ctl_loss: margin must be >= 0");

  // each label needs >= 2 instances and at least two labels must be present
  {
    std::vector<int> counts;
    for (int i = 0; i < b; ++i) {
      const int lbl = batch_labels(i);
      if (lbl < 0) throw DegenerateBatch("ctl_loss: negative label in batch");
      if (lbl >= static_cast<int>(counts.size())) counts.resize(lbl + 1, 0);
      ++counts[lbl];
    }
    int present = 0;
    for (int c : counts) {
      if (c == 1) throw DegenerateBatch("ctl_loss: a label appears only once");
      if (c > 0) ++present;
    }
    if (present < 2) throw DegenerateBatch("ctl_loss: batch needs at least two labels");
  }

  const Matrix dist = pairwise_euclidean(batch_features);
  LossResult result;
  result.grad = Matrix::Zero(b, batch_features.cols());
  for (int a = 0; a < b; ++a) {
    int hardest_pos = a;
    double d_ap = 0.0;
    int hardest_neg = -1;
    double d_an = 0.0;
    for (int j = 0; j < b; ++j) {
      if (batch_labels(j) == batch_labels(a)) {
        if (dist(a, j) > d_ap) {
          d_ap = dist(a, j);
          hardest_pos = j;
        }
      } else if (hardest_neg < 0 || dist(a, j) < d_an) {
        d_an = dist(a, j);
        hardest_neg = j;
      }
    }
    const double hinge = margin + d_ap - d_an;
    if (hinge > 0.0) {
      result.value += hinge;
      add_distance_grad(result.grad, batch_features, a, hardest_pos, 1.0);
      add_distance_grad(result.grad, batch_features, a, hardest_neg, -1.0);
    }
  }
  return result;
}

LossResult rtl_loss(const Matrix& batch_features, std::span<const RankedTriplet> triplets,
                    double margin, int eta) {
  if (eta < 1) throw EtaTooLarge("rtl_loss: eta must be >= 1");
  LossResult result;
  result.grad = Matrix::Zero(batch_features.rows(), batch_features.cols());
  for (const RankedTriplet& t : triplets) {
    const double soft_margin =
        std::abs(t.pos_rank - t.neg_rank) / static_cast<double>(eta) * margin;
    const double d_ap = (batch_features.row(t.anchor) - batch_features.row(t.positive)).norm();
    const double d_an = (batch_features.row(t.anchor) - batch_features.row(t.negative)).norm();
    const double hinge = soft_margin + d_ap - d_an;
    if (hinge > 0.0) {
      result.value += hinge;
      add_distance_grad(result.grad, batch_features, t.anchor, t.positive, 1.0);
      add_distance_grad(result.grad, batch_features, t.anchor, t.negative, -1.0);
    }
  }
  return result;
}

LossResult conservative_loss(const LossResult& ctl, const LossResult& rtl, double lambda) {
  if (ctl.grad.rows() != rtl.grad.rows() || ctl.grad.cols() != rtl.grad.cols())
    throw ShapeMismatch("conservative_loss: gradient shapes differ");
  LossResult result;
  result.value = rtl.value + lambda * ctl.value;
  result.grad = rtl.grad + lambda * ctl.grad;
  return result;
}

LossResult softmax_ce_loss(const Matrix& logits, const IntVector& labels) {
  const int b = static_cast<int>(logits.rows());
  const int c = static_cast<int>(logits.cols());
  if (labels.size() != b) throw ShapeMismatch("softmax_ce_loss: labels do not match logit rows");

  LossResult result;
  result.grad = Matrix::Zero(b, c);
  for (int i = 0; i < b; ++i) {
    const int y = labels(i);
    if (y < 0 || y >= c) throw LabelOutOfRange("softmax_ce_loss: label " + std::to_string(y));
    const double mx = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd shifted = logits.row(i).array() - mx;
    const Eigen::RowVectorXd exps = shifted.array().exp();
    const double z = exps.sum();
    result.value += std::log(z) - shifted(y);
    result.grad.row(i) = exps / z;
    result.grad(i, y) -= 1.0;
  }
  return result;
}

Matrix init_classifier(const Matrix& cluster_mean_rows) {
  if (cluster_mean_rows.rows() < 1) throw EmptyCluster("init_classifier: need at least one cluster");
  return cluster_mean_rows.transpose();
}

}  // namespace past
