#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dse/linalg.hpp"

namespace dse::datagen {

using linalg::Matrix;
using linalg::Vector;

enum class Population { A, B };

/// n x d feature matrix with per-sample class labels (1 or 2) and an
/// optional population tag.
struct LabeledDataset {
  Matrix features;
  std::vector<int> labels;
  std::optional<Population> population;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }

  /// Throws unless labels and features are rectangular-consistent and all
  /// labels are 1 or 2.
  void validate() const;
  bool has_both_classes() const;
};

/// Two-class spherical Gaussian task: class 1 centred at the origin,
/// class 2 at t * a, both with covariance nu^2 I. The direction is
/// normalized to unit length on construction; the raw vector is kept for
/// reporting.
class GaussianTaskSpec {
public:
  GaussianTaskSpec(std::size_t d, double t, double nu, Vector direction,
                   std::size_t n_per_class, std::uint64_t seed);

  std::size_t dim() const { return d_; }
  double separation() const { return t_; }
  double noise() const { return nu_; }
  const Vector& direction() const { return a_; }
  const Vector& raw_direction() const { return raw_a_; }
  std::size_t n_per_class() const { return n_per_class_; }
  std::uint64_t seed() const { return seed_; }

  GaussianTaskSpec with_seed(std::uint64_t seed) const {
    GaussianTaskSpec s = *this;
    s.seed_ = seed;
    return s;
  }

private:
  std::size_t d_;
  double t_;
  double nu_;
  Vector a_;
  Vector raw_a_;
  std::size_t n_per_class_;
  std::uint64_t seed_;
};

/// Draws n_per_class samples from N(0, nu^2 I) labeled 1 and n_per_class
/// from N(t a, nu^2 I) labeled 2. Deterministic given the spec seed.
LabeledDataset sample_task(const GaussianTaskSpec& spec);

/// The two orthogonal benchmark directions, zero-padded to dimension d
/// (d >= 8) and normalized to unit length:
///   a1 ~ [1, 1, 0, 0, 1/2, 1/2, 0, ...]
///   a2 ~ [0, 0, 1, 1, 0, 0, 1/2, 1/2, 0, ...]
std::pair<Vector, Vector> benchmark_directions(std::size_t d);

/// Unnormalized variants of the above (the raw vectors before unit scaling).
std::pair<Vector, Vector> benchmark_directions_raw(std::size_t d);

/// Applies the (i, j)-plane rotation by alpha to a unit vector.
Vector rotated_direction(const Vector& a, double alpha,
                         std::pair<std::size_t, std::size_t> plane);

/// Mixture covariance of the task: C = nu^2 I + (t^2 / 4) a a^T.
Matrix theoretical_covariance(const GaussianTaskSpec& spec);

} // namespace dse::datagen
