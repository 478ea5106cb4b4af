#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dse/datagen.hpp"
#include "dse/learners.hpp"
#include "dse/metrics.hpp"
#include "dse/separations.hpp"

namespace dse::pipeline {

using datagen::GaussianTaskSpec;
using datagen::LabeledDataset;
using learners::RelevanceVector;
using linalg::Matrix;
using linalg::Vector;

enum class Resampling { FreshSynthetic, UndersampleReal };

struct PhaseOneConfig {
  int runs = 100;
  learners::LearnerConfig learner;
  Resampling resampling = Resampling::FreshSynthetic;
  double test_fraction = 0.3;
  std::uint64_t base_seed = 0;
  int threads = 0; // 0 = all available cores
  /// Optional training-time invariant hook, not part of the configuration
  /// identity (never serialized).
  const learners::TrainObserver* observer = nullptr;

  void validate() const;
};

struct PhaseTwoConfig {
  int runs = 100;
  learners::LearnerConfig learner;
  double test_fraction = 0.3;
  std::uint64_t base_seed = 0;
  int threads = 0; // 0 = all available cores
  const learners::TrainObserver* observer = nullptr;

  void validate() const;
};

/// One ensemble of per-run relevance vectors with the held-out AUC, ROC
/// curve and the seed that produced each run.
struct RelevanceEnsemble {
  int case_id = 0;
  std::vector<RelevanceVector> relevances;
  Vector aucs;
  std::vector<std::uint64_t> seeds;
  std::vector<metrics::RocCurve> curves;

  std::size_t size() const { return relevances.size(); }
  std::size_t dim() const;
  Vector mean_relevance() const;
  void validate() const;
};

struct AucSummary {
  double mean = 0.0;
  double stddev = 0.0;
};

AucSummary summarize(const Vector& values);

/// Sample coordinates under the top-2 discriminative eigendirections.
struct EmbeddingTable {
  Matrix coords{1, 2};
  std::vector<int> labels;
};

/// Full experiment description; the io module maps this to and from the
/// config file format.
struct ExperimentSpec {
  enum class Mode { Synthetic, Csv };
  Mode mode = Mode::Synthetic;

  // Synthetic task family: two populations solving the same two-class
  // problem along different directions.
  std::size_t d = 17;
  double t = 0.25;
  double nu = 1.0;
  std::size_t n_per_class = 500;
  /// When set, case 1 discriminates along e1 and case 2 along e1 rotated
  /// by this angle in the (e1, e2) plane; otherwise the benchmark
  /// directions over the first 8 features are used (requires d >= 8).
  std::optional<double> alpha_deg;

  /// CSV mode: path to a dataset with a population column.
  std::string csv_path;

  PhaseOneConfig phase1;
  PhaseTwoConfig phase2;
  std::uint64_t base_seed = 42;
  int threads = 0; // 0 = all available cores

  void validate() const;
  /// Case directions implied by the synthetic settings (unit length).
  std::pair<Vector, Vector> directions() const;
};

struct DseReport {
  ExperimentSpec config;
  RelevanceEnsemble case1;
  RelevanceEnsemble case2;
  RelevanceEnsemble phase2;
  AucSummary auc_case1;
  AucSummary auc_case2;
  AucSummary auc_phase2;
  metrics::RocCurve roc_case1;
  metrics::RocCurve roc_case2;
  metrics::RocCurve roc_phase2;
  separations::SeparationRecord separations;
  /// Closed-form separation fields are only meaningful for synthetic runs.
  bool has_theory = false;
  EmbeddingTable embedding_case1;
  EmbeddingTable embedding_case2;
  EmbeddingTable embedding_phase2;
};

/// Both classes downsampled without replacement to the minority count;
/// surviving rows keep their original order.
LabeledDataset undersample_balanced(const LabeledDataset& data, std::uint64_t seed);

/// Class-stratified split. With equally sized classes the same selection
/// pattern is applied to both, so relabeling the classes yields the same
/// row partition.
struct SplitResult {
  LabeledDataset train;
  LabeledDataset test;
};
SplitResult stratified_split(const LabeledDataset& data, double test_fraction,
                             std::uint64_t seed);

/// Phase 1 over fresh synthetic draws of the given task.
RelevanceEnsemble run_phase1_case(const GaussianTaskSpec& task,
                                  const PhaseOneConfig& config, int case_id);

/// Phase 1 over a real dataset, re-undersampled per run.
RelevanceEnsemble run_phase1_case(const LabeledDataset& data,
                                  const PhaseOneConfig& config, int case_id);

/// Pools the two ensembles into one labeled dataset: label 1 for case-1
/// rows, 2 for case-2 rows.
LabeledDataset build_phase2_dataset(const RelevanceEnsemble& r1,
                                    const RelevanceEnsemble& r2);

/// Trains the phase-2 learner over bootstrap train/test splits of the
/// pooled relevance dataset.
RelevanceEnsemble run_phase2(const LabeledDataset& phase2_data,
                             const PhaseTwoConfig& config);

/// Full procedure: two phase-1 ensembles, the phase-2 classification of
/// their relevance vectors, separation measures and inspection embeddings.
/// Real datasets (CSV mode) are passed in by the caller.
DseReport run_dse(const ExperimentSpec& spec,
                  const std::optional<std::pair<LabeledDataset, LabeledDataset>>&
                      real_data = std::nullopt);

} // namespace dse::pipeline

namespace dse::separations {

/// Ensemble overload of the empirical separation.
inline SeparationRecord experimental_separation(
    const pipeline::RelevanceEnsemble& r1, const pipeline::RelevanceEnsemble& r2) {
  return experimental_separation(r1.relevances, r2.relevances);
}

} // namespace dse::separations
