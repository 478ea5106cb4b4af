#include "dse/separations.hpp"

#include <cmath>
#include <numbers>

#include "dse/base.hpp"

namespace dse::separations {
namespace {

void check_scale(double t, double nu) {
  if (!(t >= 0.0)) throw ConfigError("separation t must be non-negative");
  if (!(nu > 0.0)) throw ConfigError("noise scale nu must be positive");
}

void check_unit(const Vector& a) {
  double norm_sq = 0.0;
  for (const double v : a) norm_sq += v * v;
  if (std::abs(norm_sq - 1.0) > 1e-8)
    throw ConfigError("direction must be unit length");
}

/// Distance between the component-wise squares of two unit directions.
double squared_profile_distance(const Vector& a1, const Vector& a2) {
  if (a1.size() != a2.size())
    throw DimensionError("directions differ in dimension");
  check_unit(a1);
  check_unit(a2);
  double acc = 0.0;
  for (std::size_t j = 0; j < a1.size(); ++j) {
    const double diff = a2[j] * a2[j] - a1[j] * a1[j];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

} // namespace

void SeparationInputs::validate() const {
  if (d < 2) throw ConfigError("dimension must be at least 2");
  check_scale(t, nu);
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi / 2 + 1e-12))
    throw ConfigError("alpha must lie in [0, pi/2]");
}

double kl_gamma_squared(double t, double nu) {
  check_scale(t, nu);
  return t * t / (2.0 * nu * nu);
}

double gamma_hat(double t, double nu) { return 0.5 * kl_gamma_squared(t, nu); }

RelevanceVector theoretical_relevance(std::size_t d, double t, double nu,
                                      const Vector& a_unit) {
  if (d < 2) throw ConfigError("dimension must be at least 2");
  if (a_unit.size() != d) throw DimensionError("direction does not match dimension");
  check_unit(a_unit);
  const double gh = gamma_hat(t, nu);
  const double xi = static_cast<double>(d) + gh;
  Vector rho(d);
  for (std::size_t j = 0; j < d; ++j) rho[j] = (1.0 + gh * a_unit[j] * a_unit[j]) / xi;
  return RelevanceVector(std::move(rho));
}

RelevanceVector theoretical_relevance_case1(std::size_t d, double t, double nu) {
  Vector e1(d, 0.0);
  if (d < 2) throw ConfigError("dimension must be at least 2");
  e1[0] = 1.0;
  return theoretical_relevance(d, t, nu, e1);
}

RelevanceVector theoretical_relevance_case2(std::size_t d, double t, double nu,
                                            double alpha) {
  SeparationInputs in{d, t, nu, alpha};
  in.validate();
  Vector a(d, 0.0);
  a[0] = std::cos(alpha);
  a[1] = std::sin(alpha);
  return theoretical_relevance(d, t, nu, a);
}

double pessimistic_separation(const SeparationInputs& in) {
  in.validate();
  const double gh = gamma_hat(in.t, in.nu);
  const double xi = static_cast<double>(in.d) + gh;
  const double s = std::sin(in.alpha);
  return std::numbers::sqrt2 * (gh / xi) * s * s;
}

double pessimistic_separation(std::size_t d, double t, double nu, const Vector& a1,
                              const Vector& a2) {
  if (d < 2 || a1.size() != d) throw DimensionError("bad dimension for separation");
  const double gh = gamma_hat(t, nu);
  const double xi = static_cast<double>(d) + gh;
  return (gh / xi) * squared_profile_distance(a1, a2);
}

double optimistic_separation(double alpha) {
  if (!(alpha >= 0.0 && alpha <= std::numbers::pi / 2 + 1e-12))
    throw ConfigError("alpha must lie in [0, pi/2]");
  const double s = std::sin(alpha);
  return std::numbers::sqrt2 * s * s;
}

double optimistic_separation(const Vector& a1, const Vector& a2) {
  return squared_profile_distance(a1, a2);
}

double separation_ratio(std::size_t d, double t, double nu) {
  if (d < 2) throw ConfigError("dimension must be at least 2");
  check_scale(t, nu);
  if (t == 0.0) return 0.0;
  const double t_tilde = t / nu;
  const double beta = 2.0 * std::sqrt(static_cast<double>(d)) / t_tilde;
  return 1.0 / (1.0 + beta * beta);
}

double separation_ratio(const SeparationInputs& in) {
  in.validate();
  return separation_ratio(in.d, in.t, in.nu);
}

SeparationRecord experimental_separation(const std::vector<RelevanceVector>& r1,
                                         const std::vector<RelevanceVector>& r2) {
  if (r1.size() < 2 || r2.size() < 2)
    throw DataError("each ensemble needs at least two relevance vectors");
  const std::size_t d = r1.front().dim();
  for (const auto& r : r1)
    if (r.dim() != d) throw DimensionError("ensemble rows differ in dimension");
  for (const auto& r : r2)
    if (r.dim() != d) throw DimensionError("ensembles differ in dimension");

  Vector mean1(d, 0.0), mean2(d, 0.0);
  for (const auto& r : r1)
    for (std::size_t j = 0; j < d; ++j) mean1[j] += r[j];
  for (const auto& r : r2)
    for (std::size_t j = 0; j < d; ++j) mean2[j] += r[j];
  for (std::size_t j = 0; j < d; ++j) {
    mean1[j] /= static_cast<double>(r1.size());
    mean2[j] /= static_cast<double>(r2.size());
  }

  Vector diff(d);
  double norm_sq = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    diff[j] = mean2[j] - mean1[j];
    norm_sq += diff[j] * diff[j];
  }
  const double epsilon_e = std::sqrt(norm_sq);
  if (epsilon_e == 0.0)
    throw NumericError("ensembles have identical means; projection direction undefined");
  for (double& v : diff) v /= epsilon_e;

  // Spread of each ensemble along the mean-difference direction, with the
  // (n-1) denominator.
  auto spread = [&](const std::vector<RelevanceVector>& rs, const Vector& mean) {
    double acc = 0.0;
    for (const auto& r : rs) {
      double p = 0.0;
      for (std::size_t j = 0; j < d; ++j) p += (r[j] - mean[j]) * diff[j];
      acc += p * p;
    }
    return std::sqrt(acc / static_cast<double>(rs.size() - 1));
  };

  SeparationRecord rec;
  rec.epsilon_e = epsilon_e;
  rec.varsigma_1 = spread(r1, mean1);
  rec.varsigma_2 = spread(r2, mean2);
  const double sigma_bar = 0.5 * (rec.varsigma_1 + rec.varsigma_2);
  if (sigma_bar == 0.0)
    throw NumericError("zero spread in both ensembles; normalized separation undefined");
  rec.delta_e = epsilon_e / sigma_bar;
  return rec;
}

KlEstimate kl_monte_carlo(std::size_t d, double t, double nu, std::size_t samples,
                          std::uint64_t seed) {
  if (d < 1) throw ConfigError("dimension must be at least 1");
  check_scale(t, nu);
  if (samples < 2) throw ConfigError("need at least two samples");

  // Draw from the shifted conditional N(t e1, nu^2 I) and average the
  // log-density ratio against N(0, nu^2 I); the expectation is the KL
  // divergence. Equal covariances make the quadratic terms cancel up to
  // the mean shift.
  Rng rng(seed);
  const double inv_two_var = 1.0 / (2.0 * nu * nu);
  double sum = 0.0, sum_sq = 0.0;
  Vector x(d);
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[j] = nu * rng.next_gaussian();
    x[0] += t;
    double norm_shifted = 0.0, norm_centered = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      norm_centered += x[j] * x[j];
      const double c = j == 0 ? x[j] - t : x[j];
      norm_shifted += c * c;
    }
    const double log_ratio = (norm_centered - norm_shifted) * inv_two_var;
    sum += log_ratio;
    sum_sq += log_ratio * log_ratio;
  }
  const double n = static_cast<double>(samples);
  KlEstimate est;
  est.mean = sum / n;
  const double var = (sum_sq - n * est.mean * est.mean) / (n - 1.0);
  est.std_error = std::sqrt(std::max(var, 0.0) / n);
  return est;
}

} // namespace dse::separations
