#pragma once

#include <cstdint>
#include <vector>

#include "dse/learners.hpp"
#include "dse/linalg.hpp"

namespace dse::separations {

using learners::RelevanceVector;
using linalg::Vector;

/// Parameters of the rotated-task comparison: case 1 discriminates along
/// e1, case 2 along e1 rotated by alpha (radians) in the (e1, e2) plane.
struct SeparationInputs {
  std::size_t d = 2;
  double t = 0.0;
  double nu = 1.0;
  double alpha = 0.0;

  /// d >= 2, t >= 0, nu > 0, alpha in [0, pi/2].
  void validate() const;
};

/// Separation measures between the two cases. The closed-form fields are
/// zero when unknown (e.g. real data with no generative model).
struct SeparationRecord {
  double epsilon_p = 0.0;
  double epsilon_o = 0.0;
  double epsilon_e = 0.0;
  double delta_e = 0.0;
  double varsigma_1 = 0.0;
  double varsigma_2 = 0.0;
  double ratio_predicted = 0.0;
};

/// KL divergence between the two class conditionals N(0, nu^2 I) and
/// N(t a, nu^2 I): t^2 / (2 nu^2).
double kl_gamma_squared(double t, double nu);

/// Half the KL divergence; the relevance excess carried by the
/// discriminative direction.
double gamma_hat(double t, double nu);

/// Theoretical relevance profile of a task discriminating along the unit
/// direction a: rho_j = (1 + gamma_hat a_j^2) / (d + gamma_hat).
RelevanceVector theoretical_relevance(std::size_t d, double t, double nu,
                                      const Vector& a_unit);

/// Specialization a = e1: [1 + gamma_hat, 1, ..., 1] / (d + gamma_hat).
RelevanceVector theoretical_relevance_case1(std::size_t d, double t, double nu);

/// a = e1 rotated by alpha in the (e1, e2) plane:
/// [1 + gamma_hat cos^2, 1 + gamma_hat sin^2, 1, ..., 1] / (d + gamma_hat).
RelevanceVector theoretical_relevance_case2(std::size_t d, double t, double nu,
                                            double alpha);

/// Distance between the theoretical relevance profiles of the two cases:
/// sqrt(2) (gamma_hat / (d + gamma_hat)) sin^2(alpha). A lower bound on
/// what an ensemble can expose.
double pessimistic_separation(const SeparationInputs& in);

/// General-direction form: (gamma_hat / (d + gamma_hat)) times the distance
/// between the component-wise squares of the two unit directions.
double pessimistic_separation(std::size_t d, double t, double nu, const Vector& a1,
                              const Vector& a2);

/// Distance between the stationary rank-1 relevance profiles:
/// sqrt(2) sin^2(alpha). The upper bound.
double optimistic_separation(double alpha);

/// General-direction form: distance between component-wise squares.
double optimistic_separation(const Vector& a1, const Vector& a2);

/// Pessimistic over optimistic: 1 / (1 + beta^2) with beta = 2 sqrt(d) / (t/nu).
/// Zero at t = 0 (the beta -> infinity limit).
double separation_ratio(const SeparationInputs& in);
double separation_ratio(std::size_t d, double t, double nu);

/// Empirical separation between two ensembles of relevance vectors:
/// epsilon_e is the distance between ensemble means; varsigma_k the
/// (n-1)-denominator spread of projections onto the mean-difference
/// direction; delta_e rescales epsilon_e by the averaged spread.
SeparationRecord experimental_separation(const std::vector<RelevanceVector>& r1,
                                         const std::vector<RelevanceVector>& r2);

/// Monte-Carlo estimate of the KL divergence between the class
/// conditionals, for checking kl_gamma_squared against sampled data.
struct KlEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};
KlEstimate kl_monte_carlo(std::size_t d, double t, double nu, std::size_t samples,
                          std::uint64_t seed);

} // namespace dse::separations
