#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "dse/datagen.hpp"
#include "dse/linalg.hpp"

namespace dse::learners {

using datagen::LabeledDataset;
using linalg::Matrix;
using linalg::Vector;

/// Per-feature importance weights: non-negative, summing to 1, i.e. a point
/// on the (d-1)-simplex. Construction validates and stores weights as given
/// so serialization round-trips are byte-exact.
class RelevanceVector {
public:
  explicit RelevanceVector(Vector weights);

  const Vector& weights() const { return weights_; }
  std::size_t dim() const { return weights_.size(); }
  double operator[](std::size_t j) const { return weights_[j]; }

private:
  Vector weights_;
};

/// Symmetric positive-semidefinite matrix with unit trace.
struct MetricTensor {
  Matrix lambda;

  /// Throws unless lambda is symmetric, PSD (eigenvalues >= -1e-10) and has
  /// trace 1 within 1e-10.
  void validate() const;
};

struct Prototype {
  Vector w;
  int class_id = 0;
};

struct GmlvqConfig {
  int prototypes_per_class = 1;
  int epochs = 100;
  double eta_prototype = 0.05;
  /// Metric learning rate; one tenth of the prototype rate so the metric
  /// adapts on a slower timescale.
  double eta_metric = 0.005;
  /// Steepness of the logistic transfer applied to mu.
  double phi_slope = 4.0;
  /// Prototype init jitter in units of the per-feature data scale.
  double jitter = 0.01;
  std::uint64_t seed = 0;
};

/// Trained GMLVQ state: prototypes, the metric factor Omega and the
/// per-epoch cost trace. Lambda = Omega^T Omega has unit trace after every
/// update.
class GmlvqModel {
public:
  GmlvqModel() = default;
  GmlvqModel(std::vector<Prototype> prototypes, Matrix omega, GmlvqConfig config,
             std::vector<double> training_trace);

  const std::vector<Prototype>& prototypes() const { return prototypes_; }
  const Matrix& omega() const { return omega_; }
  const GmlvqConfig& config() const { return config_; }
  const std::vector<double>& training_trace() const { return training_trace_; }

  std::size_t dim() const { return omega_.rows(); }
  Matrix lambda() const;
  MetricTensor metric() const;

private:
  std::vector<Prototype> prototypes_;
  Matrix omega_;
  GmlvqConfig config_;
  std::vector<double> training_trace_;
};

enum class SvmPenalty { L2, L1 };

struct SvmConfig {
  int epochs = 100;
  /// Regularization strength; 0 selects the default 1/n.
  double lambda = 0.0;
  SvmPenalty penalty = SvmPenalty::L2;
  double eta0 = 0.5;
  std::uint64_t seed = 0;
};

/// Trained linear soft-margin SVM in z-scored coordinates.
class SvmModel {
public:
  SvmModel() = default;
  SvmModel(Vector omega, double bias, Vector feature_mean, Vector feature_scale,
           SvmConfig config, std::vector<double> objective_trace);

  const Vector& omega() const { return omega_; }
  double bias() const { return bias_; }
  const Vector& feature_mean() const { return feature_mean_; }
  const Vector& feature_scale() const { return feature_scale_; }
  const SvmConfig& config() const { return config_; }
  const std::vector<double>& objective_trace() const { return objective_trace_; }

  std::size_t dim() const { return omega_.size(); }

private:
  Vector omega_;
  double bias_ = 0.0;
  Vector feature_mean_;
  Vector feature_scale_;
  SvmConfig config_;
  std::vector<double> objective_trace_;
};

/// Quadratic distance (x - w)^T Lambda (x - w) under the model metric.
double gmlvq_distance(const GmlvqModel& model, const Vector& w, const Vector& x);

/// Sum over samples of Phi(mu(x)) with mu the relative distance difference
/// between the closest correct and closest incorrect prototypes.
double gmlvq_cost(const GmlvqModel& model, const LabeledDataset& data);

/// Per-sample cost Phi(mu(x, label)) for a hypothetical labeled sample.
double gmlvq_sample_cost(const GmlvqModel& model, const Vector& x, int label);

/// Analytic per-sample gradients of Phi(mu) with respect to the winning
/// prototypes and Omega, together with the winner bookkeeping.
struct GmlvqGradients {
  std::size_t p_index = 0;
  std::size_t q_index = 0;
  double mu = 0.0;
  double cost = 0.0;
  Vector d_wp;
  Vector d_wq;
  Matrix d_omega;
};
GmlvqGradients gmlvq_sample_gradients(const GmlvqModel& model, const Vector& x,
                                      int label);

/// Observation hook for training-time invariant checks; called with the
/// current Omega every `every_n_updates` per-sample updates.
struct TrainObserver {
  std::function<void(const Matrix& omega)> on_update;
  int every_n_updates = 10;
};

GmlvqModel train_gmlvq(const LabeledDataset& data, const GmlvqConfig& config,
                       const TrainObserver* observer = nullptr);

SvmModel train_svm(const LabeledDataset& data, const SvmConfig& config);

/// omega^T x + b in standardized coordinates (linear kernel).
double svm_score(const SvmModel& model, const Vector& x);

/// Diagonal of Lambda.
RelevanceVector relevance_from_gmlvq(const GmlvqModel& model);

/// Component-wise squares of omega / ||omega||.
RelevanceVector relevance_from_svm(const SvmModel& model);

using TrainedModel = std::variant<GmlvqModel, SvmModel>;

/// Unified score: GMLVQ returns mu(x) in [-1, 1], SVM the margin value.
/// Higher score favors class 2.
double classifier_score(const TrainedModel& model, const Vector& x);

RelevanceVector relevance_of(const TrainedModel& model);

std::size_t model_dim(const TrainedModel& model);

/// JSON round-trip for trained models (learner kind, dimension, state,
/// Lambda, relevances, config, seed).
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

enum class LearnerKind { Gmlvq, Svm };

struct LearnerConfig {
  LearnerKind kind = LearnerKind::Gmlvq;
  GmlvqConfig gmlvq;
  SvmConfig svm;

  LearnerConfig with_seed(std::uint64_t seed) const {
    LearnerConfig c = *this;
    c.gmlvq.seed = seed;
    c.svm.seed = seed;
    return c;
  }
};

TrainedModel train(const LabeledDataset& data, const LearnerConfig& config,
                   const TrainObserver* observer = nullptr);

} // namespace dse::learners
