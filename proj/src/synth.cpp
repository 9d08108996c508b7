#include "past/synth.hpp"

#include <cmath>

#include "past/errors.hpp"
#include "past/rng.hpp"

namespace past {

void SynthSpec::validate() const {
  if (source_identities < 2 || target_identities < 2)
    throw InvalidSpec("synth: need at least 2 identities per domain");
  if (!(noise > 0.0)) throw InvalidSpec("synth: noise scale must be > 0");
  if (samples_min < 1 || samples_max < samples_min) throw InvalidSpec("synth: bad samples range");
  if (raw_dim < 2) throw InvalidSpec("synth: raw_dim must be >= 2");
  if (cameras < 2) throw InvalidSpec("synth: need at least 2 cameras");
  if (shift_scale < 1.0) throw InvalidSpec("synth: shift_scale must be >= 1");
  if (shift_bias < 0.0) throw InvalidSpec("synth: shift_bias must be >= 0");
  if (query_per_identity < 1 || gallery_per_identity < 1)
    throw InvalidSpec("synth: need held-out query and gallery samples");
}

namespace {

Matrix random_rotation(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)  // fix the sign convention so Q is unique
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

struct DomainShift {
  Matrix rotation;
  Vector scale;
  Vector bias;

  Eigen::RowVectorXd apply(const Eigen::RowVectorXd& x) const {
    return ((rotation * x.transpose()).cwiseProduct(scale) + bias).transpose();
  }
};

DomainShift draw_shift(const SynthSpec& spec, Rng& rng) {
  DomainShift shift;
  shift.rotation = spec.shift_rotate ? random_rotation(spec.raw_dim, rng)
                                     : Matrix::Identity(spec.raw_dim, spec.raw_dim);
  shift.scale = Vector::Ones(spec.raw_dim);
  if (spec.shift_scale > 1.0) {
    const double log_s = std::log(spec.shift_scale);
    for (int j = 0; j < spec.raw_dim; ++j) shift.scale(j) = std::exp(rng.uniform(-log_s, log_s));
  }
  shift.bias = Vector::Zero(spec.raw_dim);
  if (spec.shift_bias > 0.0)
    for (int j = 0; j < spec.raw_dim; ++j) shift.bias(j) = spec.shift_bias * rng.normal();
  return shift;
}

Eigen::RowVectorXd blob_sample(const Eigen::RowVectorXd& center, double noise, Rng& rng) {
  Eigen::RowVectorXd x = center;
  for (Eigen::Index j = 0; j < x.size(); ++j) x(j) += noise * rng.normal();
  return x;
}

}  // namespace

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, 0x73796e7468));

  const DomainShift shift = draw_shift(spec, rng);

  Matrix source_centers(spec.source_identities, spec.raw_dim);
  for (int i = 0; i < spec.source_identities; ++i)
    for (int j = 0; j < spec.raw_dim; ++j) source_centers(i, j) = rng.normal();
  Matrix target_centers(spec.target_identities, spec.raw_dim);
  for (int i = 0; i < spec.target_identities; ++i)
    for (int j = 0; j < spec.raw_dim; ++j) target_centers(i, j) = rng.normal();

  SynthData data;

  // source: labeled, no shift
  {
    std::vector<Eigen::RowVectorXd> rows;
    for (int id = 0; id < spec.source_identities; ++id) {
      const int count = spec.samples_min + rng.next_int(spec.samples_max - spec.samples_min + 1);
      for (int s = 0; s < count; ++s) {
        Sample sample;
        sample.id = static_cast<int>(rows.size());
        sample.identity = id;
        sample.camera = s % spec.cameras;
        data.source.samples.push_back(sample);
        rows.push_back(blob_sample(source_centers.row(id), spec.noise, rng));
      }
    }
    data.source.features.resize(static_cast<Eigen::Index>(rows.size()), spec.raw_dim);
    for (std::size_t i = 0; i < rows.size(); ++i) data.source.features.row(i) = rows[i];
  }

  // target: shifted; train split plus disjoint held-out query/gallery
  auto push_target = [&](Dataset& dst, int identity, int camera) {
    Sample sample;
    sample.id = dst.size();
    sample.identity = identity;
    sample.camera = camera;
    dst.samples.push_back(sample);
    return shift.apply(blob_sample(target_centers.row(identity), spec.noise, rng));
  };

  std::vector<Eigen::RowVectorXd> train_rows, query_rows, gallery_rows;
  for (int id = 0; id < spec.target_identities; ++id) {
    const int count = spec.samples_min + rng.next_int(spec.samples_max - spec.samples_min + 1);
    for (int s = 0; s < count; ++s)
      train_rows.push_back(push_target(data.target, id, s % spec.cameras));
    for (int s = 0; s < spec.query_per_identity; ++s)
      query_rows.push_back(push_target(data.query, id, 0));
    for (int s = 0; s < spec.gallery_per_identity; ++s)
      gallery_rows.push_back(push_target(data.gallery, id, 1 + s % (spec.cameras - 1)));
  }
  auto to_matrix = [&](Dataset& dst, const std::vector<Eigen::RowVectorXd>& rows) {
    dst.features.resize(static_cast<Eigen::Index>(rows.size()), spec.raw_dim);
    for (std::size_t i = 0; i < rows.size(); ++i) dst.features.row(i) = rows[i];
  };
  to_matrix(data.target, train_rows);
  to_matrix(data.query, query_rows);
  to_matrix(data.gallery, gallery_rows);

  data.source.validate();
  data.target.validate();
  data.query.validate();
  data.gallery.validate();
  return data;
}

}  // namespace past
