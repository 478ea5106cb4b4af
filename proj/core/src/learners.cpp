#include "dse/learners.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <utility>

#include "dse/base.hpp"
#include "json.hpp"

namespace dse::learners {
namespace {

constexpr double kMuEpsilon = 1e-12;

double logistic(double slope, double m) { return 1.0 / (1.0 + std::exp(-slope * m)); }

Vector class_mean(const LabeledDataset& data, int class_id) {
  const std::size_t d = data.dim();
  Vector mean(d, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != class_id) continue;
    const double* row = data.features.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
    ++count;
  }
  for (double& v : mean) v /= static_cast<double>(count);
  return mean;
}

/// Per-feature population standard deviation over the whole dataset; the /n
/// denominator keeps z-scored coordinates identical when every sample is
/// duplicated. Zero variance maps to scale 1 so constant features stay inert.
Vector feature_std(const Matrix& features, const Vector& mean) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  Vector out(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = features.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double c = row[j] - mean[j];
      out[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    double& v = out[j];
    v = std::sqrt(v / static_cast<double>(n));
    // A constant column can leave a ~1e-16 residue through the rounded
    // mean; snap it to an exact zero so callers can detect degeneracy
    // instead of dividing by (and so amplifying) rounding noise.
    if (v <= 1e-12 * (1.0 + std::abs(mean[j]))) v = 0.0;
  }
  return out;
}

Vector feature_mean(const Matrix& features) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  Vector mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = features.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (double& v : mean) v /= static_cast<double>(n);
  return mean;
}

// z = Omega * (x - w); returns ||z||^2. x may be a raw row pointer.
double metric_distance(const Matrix& omega, const Vector& w, const double* x,
                       Vector& u, Vector& z) {
  const std::size_t d = omega.rows();
  for (std::size_t j = 0; j < d; ++j) u[j] = x[j] - w[j];
  double total = 0.0;
  for (std::size_t l = 0; l < d; ++l) {
    const double* row = omega.row(l);
    double acc = 0.0;
    for (std::size_t m = 0; m < d; ++m) acc += row[m] * u[m];
    z[l] = acc;
    total += acc * acc;
  }
  return total;
}

// g = Omega^T z, i.e. Lambda * u when z = Omega * u.
void omega_transpose_apply(const Matrix& omega, const Vector& z, Vector& g) {
  const std::size_t d = omega.rows();
  std::fill(g.begin(), g.end(), 0.0);
  for (std::size_t l = 0; l < d; ++l) {
    const double* row = omega.row(l);
    const double zl = z[l];
    if (zl == 0.0) continue;
    for (std::size_t m = 0; m < d; ++m) g[m] += zl * row[m];
  }
}

struct WinnerPair {
  std::size_t p = 0; // closest prototype of the sample's class
  std::size_t q = 0; // closest prototype of the other class
  double dp = 0.0;
  double dq = 0.0;
};

WinnerPair find_winners(const Matrix& omega, const std::vector<Prototype>& prototypes,
                        const double* x, int label, Vector& u, Vector& z) {
  WinnerPair win;
  double best_p = std::numeric_limits<double>::infinity();
  double best_q = std::numeric_limits<double>::infinity();
  bool saw_p = false;
  bool saw_q = false;
  for (std::size_t k = 0; k < prototypes.size(); ++k) {
    const double dist = metric_distance(omega, prototypes[k].w, x, u, z);
    if (prototypes[k].class_id == label) {
      if (dist < best_p) {
        best_p = dist;
        win.p = k;
        saw_p = true;
      }
    } else if (dist < best_q) {
      best_q = dist;
      win.q = k;
      saw_q = true;
    }
  }
  if (!saw_p || !saw_q)
    throw DataError("sample label " + std::to_string(label) +
                    " has no prototype pair to compare against");
  win.dp = best_p;
  win.dq = best_q;
  return win;
}

double cost_over(const Matrix& omega, const std::vector<Prototype>& prototypes,
                 double slope, const LabeledDataset& data, Vector& u, Vector& z) {
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const WinnerPair win =
        find_winners(omega, prototypes, data.features.row(i), data.labels[i], u, z);
    const double mu = (win.dp - win.dq) / (win.dp + win.dq + kMuEpsilon);
    total += logistic(slope, mu);
  }
  return total;
}

void check_gmlvq_config(const GmlvqConfig& config) {
  if (config.prototypes_per_class < 1)
    throw ConfigError("prototypes_per_class must be at least 1");
  if (config.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (config.eta_prototype <= 0.0 || config.eta_metric <= 0.0)
    throw ConfigError("learning rates must be positive");
  if (config.phi_slope <= 0.0) throw ConfigError("phi_slope must be positive");
  if (config.jitter < 0.0) throw ConfigError("jitter must be non-negative");
}

void check_svm_config(const SvmConfig& config) {
  if (config.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (config.lambda < 0.0) throw ConfigError("lambda must be non-negative");
  if (config.eta0 <= 0.0) throw ConfigError("eta0 must be positive");
}

using nlohmann::json;

json vector_to_json(const Vector& v) { return json(v); }

Vector vector_from_json(const json& j) { return j.get<Vector>(); }

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  const std::size_t rows = j.size();
  if (rows == 0) throw ConfigError("matrix in model document is empty");
  const std::size_t cols = j.at(0).size();
  Vector flat;
  flat.reserve(rows * cols);
  for (const auto& row : j) {
    if (row.size() != cols) throw ConfigError("ragged matrix in model document");
    for (const auto& v : row) flat.push_back(v.get<double>());
  }
  return Matrix(rows, cols, std::move(flat));
}

} // namespace

RelevanceVector::RelevanceVector(Vector weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw DimensionError("relevance vector must be non-empty");
  double sum = 0.0;
  for (double& w : weights_) {
    if (!std::isfinite(w)) throw NumericError("relevance vector has non-finite entry");
    if (w < -1e-10)
      throw NumericError("relevance vector has negative entry " + std::to_string(w));
    // Clamp roundoff-negative entries; construction stays idempotent so
    // serialization round-trips byte-exactly.
    if (w < 0.0) w = 0.0;
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw NumericError("relevance vector sums to " + std::to_string(sum) +
                       ", expected 1");
}

void MetricTensor::validate() const {
  if (lambda.rows() != lambda.cols())
    throw DimensionError("metric tensor must be square");
  if (!lambda.is_symmetric(1e-10)) throw NumericError("metric tensor not symmetric");
  if (std::abs(lambda.trace() - 1.0) > 1e-10)
    throw NumericError("metric tensor trace deviates from 1 by " +
                       std::to_string(lambda.trace() - 1.0));
  const auto eig = linalg::sym_eigen(lambda);
  const double min_eig = eig.eigenvalues.back();
  if (min_eig < -1e-10)
    throw NumericError("metric tensor has negative eigenvalue " +
                       std::to_string(min_eig));
}

GmlvqModel::GmlvqModel(std::vector<Prototype> prototypes, Matrix omega,
                       GmlvqConfig config, std::vector<double> training_trace)
    : prototypes_(std::move(prototypes)),
      omega_(std::move(omega)),
      config_(config),
      training_trace_(std::move(training_trace)) {
  if (prototypes_.empty()) throw DimensionError("model needs prototypes");
  for (const auto& p : prototypes_)
    if (p.w.size() != omega_.cols())
      throw DimensionError("prototype dimension does not match metric");
}

Matrix GmlvqModel::lambda() const {
  const std::size_t d = omega_.rows();
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < d; ++l) acc += omega_(l, i) * omega_(l, j);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  return out;
}

MetricTensor GmlvqModel::metric() const { return MetricTensor{lambda()}; }

SvmModel::SvmModel(Vector omega, double bias, Vector feature_mean,
                   Vector feature_scale, SvmConfig config,
                   std::vector<double> objective_trace)
    : omega_(std::move(omega)),
      bias_(bias),
      feature_mean_(std::move(feature_mean)),
      feature_scale_(std::move(feature_scale)),
      config_(config),
      objective_trace_(std::move(objective_trace)) {
  if (omega_.size() != feature_mean_.size() || omega_.size() != feature_scale_.size())
    throw DimensionError("separator and standardization dimensions disagree");
}

double gmlvq_distance(const GmlvqModel& model, const Vector& w, const Vector& x) {
  const std::size_t d = model.dim();
  if (w.size() != d || x.size() != d)
    throw DimensionError("distance arguments do not match model dimension");
  Vector u(d), z(d);
  return metric_distance(model.omega(), w, x.data(), u, z);
}

double gmlvq_cost(const GmlvqModel& model, const LabeledDataset& data) {
  data.validate();
  if (data.dim() != model.dim())
    throw DimensionError("dataset dimension does not match model");
  Vector u(model.dim()), z(model.dim());
  return cost_over(model.omega(), model.prototypes(), model.config().phi_slope, data,
                   u, z);
}

double gmlvq_sample_cost(const GmlvqModel& model, const Vector& x, int label) {
  if (x.size() != model.dim())
    throw DimensionError("sample dimension does not match model");
  Vector u(model.dim()), z(model.dim());
  const WinnerPair win =
      find_winners(model.omega(), model.prototypes(), x.data(), label, u, z);
  const double mu = (win.dp - win.dq) / (win.dp + win.dq + kMuEpsilon);
  return logistic(model.config().phi_slope, mu);
}

GmlvqGradients gmlvq_sample_gradients(const GmlvqModel& model, const Vector& x,
                                      int label) {
  const std::size_t d = model.dim();
  if (x.size() != d) throw DimensionError("sample dimension does not match model");
  const Matrix& omega = model.omega();

  Vector up(d), zp(d), uq(d), zq(d);
  WinnerPair win;
  {
    Vector u(d), z(d);
    win = find_winners(omega, model.prototypes(), x.data(), label, u, z);
  }
  const double dp = metric_distance(omega, model.prototypes()[win.p].w, x.data(), up, zp);
  const double dq = metric_distance(omega, model.prototypes()[win.q].w, x.data(), uq, zq);

  const double sum = dp + dq + kMuEpsilon;
  const double mu = (dp - dq) / sum;
  const double phi = logistic(model.config().phi_slope, mu);
  const double phi_prime = model.config().phi_slope * phi * (1.0 - phi);
  const double dmu_ddp = 2.0 * dq / (sum * sum);
  const double dmu_ddq = -2.0 * dp / (sum * sum);

  GmlvqGradients grad;
  grad.p_index = win.p;
  grad.q_index = win.q;
  grad.mu = mu;
  grad.cost = phi;

  // d(dist)/dw = -2 Lambda u; chain through phi and mu.
  Vector gp(d), gq(d);
  omega_transpose_apply(omega, zp, gp);
  omega_transpose_apply(omega, zq, gq);
  grad.d_wp.resize(d);
  grad.d_wq.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    grad.d_wp[j] = phi_prime * dmu_ddp * (-2.0 * gp[j]);
    grad.d_wq[j] = phi_prime * dmu_ddq * (-2.0 * gq[j]);
  }

  // d(dist)/dOmega_{lm} = 2 (Omega u)_l u_m for each winner's u.
  grad.d_omega = Matrix(d, d);
  for (std::size_t l = 0; l < d; ++l)
    for (std::size_t m = 0; m < d; ++m)
      grad.d_omega(l, m) = phi_prime * (dmu_ddp * 2.0 * zp[l] * up[m] +
                                        dmu_ddq * 2.0 * zq[l] * uq[m]);
  return grad;
}

GmlvqModel train_gmlvq(const LabeledDataset& data, const GmlvqConfig& config,
                       const TrainObserver* observer) {
  check_gmlvq_config(config);
  data.validate();
  if (!data.has_both_classes())
    throw DataError("training data must contain both classes");

  const std::size_t n = data.size();
  const std::size_t d = data.dim();

  const Vector pooled_mean = feature_mean(data.features);
  const Vector scale = feature_std(data.features, pooled_mean);

  // Prototypes start at the class means with a small content-keyed jitter,
  // so identical point clouds always receive identical prototypes no matter
  // how the two classes are labeled.
  std::vector<Prototype> prototypes;
  prototypes.reserve(2 * static_cast<std::size_t>(config.prototypes_per_class));
  for (int class_id : {1, 2}) {
    const Vector mean = class_mean(data, class_id);
    for (int k = 0; k < config.prototypes_per_class; ++k) {
      std::uint64_t jseed = rng::mix64(
          config.seed ^ hash_bytes(mean.data(), mean.size() * sizeof(double)));
      jseed = rng::mix64(jseed + static_cast<std::uint64_t>(k));
      Rng jitter_rng(jseed);
      Prototype proto;
      proto.class_id = class_id;
      proto.w = mean;
      for (std::size_t j = 0; j < d; ++j)
        proto.w[j] += config.jitter * scale[j] * jitter_rng.next_gaussian();
      prototypes.push_back(std::move(proto));
    }
  }

  Matrix omega(d, d);
  const double init = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j) omega(j, j) = init;

  Rng order_rng(rng::mix64(config.seed ^ 0x474D4C5651ULL));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Vector up(d), zp(d), uq(d), zq(d), gp(d), gq(d), u(d), z(d);
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.epochs));
  long long update_count = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double anneal = 1.0 + epoch / 10.0;
    const double eta_w = config.eta_prototype / anneal;
    const double eta_o = config.eta_metric / anneal;
    order_rng.shuffle(order);

    for (const std::size_t idx : order) {
      const double* x = data.features.row(idx);
      const int label = data.labels[idx];
      const WinnerPair win = find_winners(omega, prototypes, x, label, u, z);
      Vector& wp = prototypes[win.p].w;
      Vector& wq = prototypes[win.q].w;

      const double dp = metric_distance(omega, wp, x, up, zp);
      const double dq = metric_distance(omega, wq, x, uq, zq);
      const double sum = dp + dq + kMuEpsilon;
      const double mu = (dp - dq) / sum;
      const double phi = logistic(config.phi_slope, mu);
      const double phi_prime = config.phi_slope * phi * (1.0 - phi);
      const double inv_s2 = 1.0 / (sum * sum);

      omega_transpose_apply(omega, zp, gp);
      omega_transpose_apply(omega, zq, gq);

      // Prototype steps: pull the correct winner toward x, push the wrong
      // one away, both along Lambda (x - w).
      const double cp = 4.0 * eta_w * phi_prime * dq * inv_s2;
      const double cq = 4.0 * eta_w * phi_prime * dp * inv_s2;
      for (std::size_t j = 0; j < d; ++j) {
        wp[j] += cp * gp[j];
        wq[j] -= cq * gq[j];
      }

      // Metric step from the same captured pre-update quantities.
      const double ap = 4.0 * eta_o * phi_prime * dq * inv_s2;
      const double aq = 4.0 * eta_o * phi_prime * dp * inv_s2;
      for (std::size_t l = 0; l < d; ++l) {
        double* row = omega.row(l);
        const double zpl = ap * zp[l];
        const double zql = aq * zq[l];
        for (std::size_t m = 0; m < d; ++m) row[m] += -zpl * up[m] + zql * uq[m];
      }

      const double fnorm = omega.frobenius_norm();
      if (!(fnorm > 1e-300)) throw NumericError("metric factor collapsed to zero");
      const double inv_norm = 1.0 / fnorm;
      for (std::size_t l = 0; l < d; ++l) {
        double* row = omega.row(l);
        for (std::size_t m = 0; m < d; ++m) row[m] *= inv_norm;
      }

      ++update_count;
      if (observer && observer->on_update &&
          update_count % observer->every_n_updates == 0)
        observer->on_update(omega);
    }

    trace.push_back(cost_over(omega, prototypes, config.phi_slope, data, u, z));
  }

  if (!omega.is_finite()) throw NumericError("metric factor diverged");
  return GmlvqModel(std::move(prototypes), std::move(omega), config, std::move(trace));
}

SvmModel train_svm(const LabeledDataset& data, const SvmConfig& config) {
  check_svm_config(config);
  data.validate();
  if (!data.has_both_classes())
    throw DataError("training data must contain both classes");

  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  const double lambda = config.lambda > 0.0 ? config.lambda : 1.0 / static_cast<double>(n);

  const Vector mean = feature_mean(data.features);
  Vector scale = feature_std(data.features, mean);
  // Constant columns carry no signal: standardize them to an exact zero so
  // they stay inert, and store a unit scale so scoring stays well defined.
  std::vector<bool> degenerate(d);
  for (std::size_t j = 0; j < d; ++j) {
    degenerate[j] = scale[j] == 0.0;
    if (degenerate[j]) scale[j] = 1.0;
  }

  // Standardized copy; the hot loop then touches contiguous rows only.
  Matrix xs(n, d);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = data.features.row(i);
    double* out = xs.row(i);
    for (std::size_t j = 0; j < d; ++j)
      out[j] = degenerate[j] ? 0.0 : (row[j] - mean[j]) / scale[j];
    y[i] = data.labels[i] == 2 ? 1.0 : -1.0;
  }

  Vector w(d, 0.0), w_avg(d, 0.0);
  double b = 0.0, b_avg = 0.0;
  Rng order_rng(rng::mix64(config.seed ^ 0x53564DULL));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.epochs));
  double steps = 0.0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double eta = config.eta0 / (1.0 + epoch / 10.0);
    order_rng.shuffle(order);

    for (const std::size_t idx : order) {
      const double* x = xs.row(idx);
      const double yi = y[idx];
      double margin = b;
      for (std::size_t j = 0; j < d; ++j) margin += w[j] * x[j];
      margin *= yi;

      const bool violated = margin < 1.0;
      if (config.penalty == SvmPenalty::L2) {
        const double keep = 1.0 - eta * lambda;
        if (violated) {
          for (std::size_t j = 0; j < d; ++j) w[j] = keep * w[j] + eta * yi * x[j];
          b += eta * yi;
        } else {
          for (std::size_t j = 0; j < d; ++j) w[j] *= keep;
        }
      } else {
        if (violated) {
          for (std::size_t j = 0; j < d; ++j) w[j] += eta * yi * x[j];
          b += eta * yi;
        }
        const double shrink = eta * lambda;
        for (std::size_t j = 0; j < d; ++j) {
          const double a = std::abs(w[j]) - shrink;
          w[j] = a > 0.0 ? std::copysign(a, w[j]) : 0.0;
        }
      }

      steps += 1.0;
      const double blend = 1.0 / steps;
      for (std::size_t j = 0; j < d; ++j) w_avg[j] += blend * (w[j] - w_avg[j]);
      b_avg += blend * (b - b_avg);
    }

    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = xs.row(i);
      double m = b_avg;
      for (std::size_t j = 0; j < d; ++j) m += w_avg[j] * x[j];
      hinge += std::max(0.0, 1.0 - y[i] * m);
    }
    double penalty = 0.0;
    if (config.penalty == SvmPenalty::L2) {
      for (const double v : w_avg) penalty += v * v;
      penalty *= 0.5 * lambda;
    } else {
      for (const double v : w_avg) penalty += std::abs(v);
      penalty *= lambda;
    }
    trace.push_back(penalty + hinge / static_cast<double>(n));
  }

  bool all_zero = true;
  for (const double v : w_avg)
    if (v != 0.0) {
      all_zero = false;
      break;
    }
  if (all_zero) throw NumericError("separator degenerated to the zero vector");

  return SvmModel(std::move(w_avg), b_avg, mean, scale, config, std::move(trace));
}

double svm_score(const SvmModel& model, const Vector& x) {
  const std::size_t d = model.dim();
  if (x.size() != d) throw DimensionError("sample dimension does not match model");
  double score = model.bias();
  for (std::size_t j = 0; j < d; ++j)
    score += model.omega()[j] * (x[j] - model.feature_mean()[j]) /
             model.feature_scale()[j];
  return score;
}

RelevanceVector relevance_from_gmlvq(const GmlvqModel& model) {
  const std::size_t d = model.dim();
  const Matrix& omega = model.omega();
  Vector diag(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::size_t l = 0; l < d; ++l) acc += omega(l, j) * omega(l, j);
    diag[j] = acc;
  }
  return RelevanceVector(std::move(diag));
}

RelevanceVector relevance_from_svm(const SvmModel& model) {
  const Vector unit = linalg::normalized(model.omega());
  Vector squares(unit.size());
  for (std::size_t j = 0; j < unit.size(); ++j) squares[j] = unit[j] * unit[j];
  return RelevanceVector(std::move(squares));
}

double classifier_score(const TrainedModel& model, const Vector& x) {
  if (const auto* g = std::get_if<GmlvqModel>(&model)) {
    if (x.size() != g->dim())
      throw DimensionError("sample dimension does not match model");
    Vector u(g->dim()), z(g->dim());
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = std::numeric_limits<double>::infinity();
    for (const auto& proto : g->prototypes()) {
      const double dist = metric_distance(g->omega(), proto.w, x.data(), u, z);
      if (proto.class_id == 1)
        d1 = std::min(d1, dist);
      else
        d2 = std::min(d2, dist);
    }
    return (d1 - d2) / (d1 + d2 + kMuEpsilon);
  }
  return svm_score(std::get<SvmModel>(model), x);
}

RelevanceVector relevance_of(const TrainedModel& model) {
  if (const auto* g = std::get_if<GmlvqModel>(&model)) return relevance_from_gmlvq(*g);
  return relevance_from_svm(std::get<SvmModel>(model));
}

std::size_t model_dim(const TrainedModel& model) {
  if (const auto* g = std::get_if<GmlvqModel>(&model)) return g->dim();
  return std::get<SvmModel>(model).dim();
}

std::string model_to_json(const TrainedModel& model) {
  json doc;
  if (const auto* g = std::get_if<GmlvqModel>(&model)) {
    doc["learner"] = "gmlvq";
    doc["dim"] = g->dim();
    doc["config"] = {{"prototypes_per_class", g->config().prototypes_per_class},
                     {"epochs", g->config().epochs},
                     {"eta_prototype", g->config().eta_prototype},
                     {"eta_metric", g->config().eta_metric},
                     {"phi_slope", g->config().phi_slope},
                     {"jitter", g->config().jitter},
                     {"seed", g->config().seed}};
    json protos = json::array();
    for (const auto& p : g->prototypes())
      protos.push_back({{"class", p.class_id}, {"w", vector_to_json(p.w)}});
    doc["prototypes"] = std::move(protos);
    doc["omega"] = matrix_to_json(g->omega());
    doc["lambda"] = matrix_to_json(g->lambda());
    doc["relevances"] = vector_to_json(relevance_from_gmlvq(*g).weights());
    doc["training_trace"] = vector_to_json(g->training_trace());
  } else {
    const auto& s = std::get<SvmModel>(model);
    doc["learner"] = "svm";
    doc["dim"] = s.dim();
    doc["config"] = {{"epochs", s.config().epochs},
                     {"lambda", s.config().lambda},
                     {"penalty", s.config().penalty == SvmPenalty::L2 ? "l2" : "l1"},
                     {"eta0", s.config().eta0},
                     {"seed", s.config().seed}};
    doc["omega"] = vector_to_json(s.omega());
    doc["bias"] = s.bias();
    doc["feature_mean"] = vector_to_json(s.feature_mean());
    doc["feature_scale"] = vector_to_json(s.feature_scale());
    doc["relevances"] = vector_to_json(relevance_from_svm(s).weights());
    doc["objective_trace"] = vector_to_json(s.objective_trace());
  }
  return doc.dump(2);
}

TrainedModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model document is not valid JSON: ") + e.what());
  }
  try {
    const std::string kind = doc.at("learner").get<std::string>();
    if (kind == "gmlvq") {
      GmlvqConfig cfg;
      const json& c = doc.at("config");
      cfg.prototypes_per_class = c.at("prototypes_per_class").get<int>();
      cfg.epochs = c.at("epochs").get<int>();
      cfg.eta_prototype = c.at("eta_prototype").get<double>();
      cfg.eta_metric = c.at("eta_metric").get<double>();
      cfg.phi_slope = c.at("phi_slope").get<double>();
      cfg.jitter = c.at("jitter").get<double>();
      cfg.seed = c.at("seed").get<std::uint64_t>();
      std::vector<Prototype> protos;
      for (const auto& p : doc.at("prototypes"))
        protos.push_back(
            Prototype{vector_from_json(p.at("w")), p.at("class").get<int>()});
      return GmlvqModel(std::move(protos), matrix_from_json(doc.at("omega")), cfg,
                        doc.at("training_trace").get<std::vector<double>>());
    }
    if (kind == "svm") {
      SvmConfig cfg;
      const json& c = doc.at("config");
      cfg.epochs = c.at("epochs").get<int>();
      cfg.lambda = c.at("lambda").get<double>();
      cfg.penalty =
          c.at("penalty").get<std::string>() == "l1" ? SvmPenalty::L1 : SvmPenalty::L2;
      cfg.eta0 = c.at("eta0").get<double>();
      cfg.seed = c.at("seed").get<std::uint64_t>();
      return SvmModel(vector_from_json(doc.at("omega")), doc.at("bias").get<double>(),
                      vector_from_json(doc.at("feature_mean")),
                      vector_from_json(doc.at("feature_scale")), cfg,
                      doc.at("objective_trace").get<std::vector<double>>());
    }
    throw ConfigError("unknown learner kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model document is malformed: ") + e.what());
  }
}

TrainedModel train(const LabeledDataset& data, const LearnerConfig& config,
                   const TrainObserver* observer) {
  if (config.kind == LearnerKind::Gmlvq)
    return train_gmlvq(data, config.gmlvq, observer);
  return train_svm(data, config.svm);
}

} // namespace dse::learners
