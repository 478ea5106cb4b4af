#include "dse/datagen.hpp"

#include <cmath>

#include "dse/base.hpp"

namespace dse::datagen {

void LabeledDataset::validate() const {
  if (labels.size() != features.rows()) {
    throw DimensionError("dataset has " + std::to_string(features.rows()) +
                         " feature rows but " + std::to_string(labels.size()) +
                         " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1 && labels[i] != 2) {
      throw DataError("label at row " + std::to_string(i) +
                      " is " + std::to_string(labels[i]) + ", expected 1 or 2");
    }
  }
  if (!features.is_finite()) {
    throw NumericError("dataset contains non-finite feature values");
  }
}

bool LabeledDataset::has_both_classes() const {
  bool c1 = false, c2 = false;
  for (int l : labels) {
    if (l == 1) c1 = true;
    if (l == 2) c2 = true;
  }
  return c1 && c2;
}

GaussianTaskSpec::GaussianTaskSpec(std::size_t d, double t, double nu,
                                   Vector direction, std::size_t n_per_class,
                                   std::uint64_t seed)
    : d_(d), t_(t), nu_(nu), raw_a_(std::move(direction)),
      n_per_class_(n_per_class), seed_(seed) {
  if (raw_a_.size() != d_) {
    throw DimensionError("direction vector length " + std::to_string(raw_a_.size()) +
                         " does not match dimension " + std::to_string(d_));
  }
  if (t_ < 0.0) throw ConfigError("separation t must be >= 0");
  if (!(nu_ > 0.0)) throw ConfigError("noise nu must be > 0");
  if (n_per_class_ < 1) throw ConfigError("n_per_class must be >= 1");
  a_ = linalg::normalized(raw_a_);
}

LabeledDataset sample_task(const GaussianTaskSpec& spec) {
  const std::size_t d = spec.dim();
  const std::size_t n = spec.n_per_class();
  Rng rng(spec.seed());

  LabeledDataset out;
  out.features = Matrix(2 * n, d);
  out.labels.assign(2 * n, 1);

  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.features.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] = spec.noise() * rng.next_gaussian();
  }
  const Vector& a = spec.direction();
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.features.row(n + i);
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = spec.separation() * a[j] + spec.noise() * rng.next_gaussian();
    }
    out.labels[n + i] = 2;
  }
  return out;
}

std::pair<Vector, Vector> benchmark_directions_raw(std::size_t d) {
  if (d < 8) {
    throw ConfigError("benchmark directions need dimension >= 8, got " +
                      std::to_string(d));
  }
  Vector a1(d, 0.0), a2(d, 0.0);
  a1[0] = 1.0;
  a1[1] = 1.0;
  a1[4] = 0.5;
  a1[5] = 0.5;
  a2[2] = 1.0;
  a2[3] = 1.0;
  a2[6] = 0.5;
  a2[7] = 0.5;
  return {a1, a2};
}

std::pair<Vector, Vector> benchmark_directions(std::size_t d) {
  auto [a1, a2] = benchmark_directions_raw(d);
  return {linalg::normalized(a1), linalg::normalized(a2)};
}

Vector rotated_direction(const Vector& a, double alpha,
                         std::pair<std::size_t, std::size_t> plane) {
  Matrix r = linalg::rotation_in_plane(a.size(), plane.first, plane.second, alpha);
  return r.apply(a);
}

Matrix theoretical_covariance(const GaussianTaskSpec& spec) {
  const std::size_t d = spec.dim();
  const Vector& a = spec.direction();
  double scale = spec.separation() * spec.separation() / 4.0;
  Matrix c = linalg::outer_product(a, a);
  for (double& v : c.data()) v *= scale;
  double nu2 = spec.noise() * spec.noise();
  for (std::size_t i = 0; i < d; ++i) c(i, i) += nu2;
  return c;
}

} // namespace dse::datagen
