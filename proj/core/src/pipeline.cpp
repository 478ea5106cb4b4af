#include "dse/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "dse/base.hpp"

namespace dse::pipeline {
namespace {

// Sub-stream tags so the data draw, the split and the learner of one run
// never share a stream.
constexpr std::uint64_t kSplitTag = 0x53504C4954ULL;
constexpr std::uint64_t kLearnTag = 0x4C4541524EULL;
constexpr std::uint64_t kResampleTag = 0x52455341ULL;

void check_fraction(double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction <= 0.5))
    throw ConfigError("test fraction must lie in (0, 0.5]");
}

std::vector<std::size_t> class_indices(const LabeledDataset& data, int class_id) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data.labels[i] == class_id) idx.push_back(i);
  return idx;
}

LabeledDataset gather_rows(const LabeledDataset& data,
                           const std::vector<std::size_t>& rows) {
  const std::size_t d = data.dim();
  Matrix features(rows.size(), d);
  std::vector<int> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = data.features.row(rows[i]);
    std::copy(src, src + d, features.row(i));
    labels[i] = data.labels[rows[i]];
  }
  return LabeledDataset{std::move(features), std::move(labels), data.population};
}

/// k distinct test positions out of n, as a membership mask.
std::vector<bool> pick_positions(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pos(n);
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  rng.shuffle(pos);
  std::vector<bool> is_test(n, false);
  for (std::size_t i = 0; i < k; ++i) is_test[pos[i]] = true;
  return is_test;
}

std::size_t test_count(std::size_t n, double fraction) {
  if (n < 2) throw DataError("each class needs at least two samples to split");
  auto k = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n - 1);
}

/// One phase-1 or phase-2 run: split, train, score held-out rows.
struct RunOutcome {
  RelevanceVector relevance;
  metrics::RocCurve curve;
};

RunOutcome evaluate_run(const LabeledDataset& data, double test_fraction,
                        std::uint64_t run_seed, const learners::LearnerConfig& learner,
                        const learners::TrainObserver* observer) {
  const SplitResult split =
      stratified_split(data, test_fraction, rng::mix64(run_seed ^ kSplitTag));
  const learners::TrainedModel model = learners::train(
      split.train, learner.with_seed(rng::mix64(run_seed ^ kLearnTag)), observer);

  Vector scores(split.test.size());
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const double* row = split.test.features.row(i);
    scores[i] = learners::classifier_score(model, Vector(row, row + split.test.dim()));
  }
  return RunOutcome{learners::relevance_of(model),
                    metrics::roc_curve(scores, split.test.labels)};
}

template <typename DrawFn>
RelevanceEnsemble run_case(DrawFn&& draw, int runs, double test_fraction,
                           const learners::LearnerConfig& learner, int threads,
                           std::uint64_t base_seed, std::uint64_t phase, int case_id,
                           const learners::TrainObserver* observer) {
  const auto n = static_cast<std::size_t>(runs);
  std::vector<std::optional<RunOutcome>> outcomes(n);
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i)
    seeds[i] = derive_seed(base_seed, phase, static_cast<std::uint64_t>(case_id), i);

  parallel_for(n, static_cast<unsigned>(std::max(threads, 0)), [&](std::size_t i) {
    const LabeledDataset data = draw(seeds[i]);
    outcomes[i] = evaluate_run(data, test_fraction, seeds[i], learner, observer);
  });

  RelevanceEnsemble ensemble;
  ensemble.case_id = case_id;
  ensemble.seeds = std::move(seeds);
  ensemble.relevances.reserve(n);
  ensemble.aucs.reserve(n);
  ensemble.curves.reserve(n);
  for (auto& out : outcomes) {
    ensemble.relevances.push_back(std::move(out->relevance));
    ensemble.aucs.push_back(out->curve.auc);
    ensemble.curves.push_back(std::move(out->curve));
  }
  return ensemble;
}

/// PSD unit-trace matrix describing a trained model's discriminative
/// geometry; for the linear separator this is the rank-1 outer product.
Matrix embedding_metric(const learners::TrainedModel& model) {
  if (const auto* g = std::get_if<learners::GmlvqModel>(&model)) return g->lambda();
  const auto& svm = std::get<learners::SvmModel>(model);
  const Vector unit = linalg::normalized(svm.omega());
  return linalg::outer_product(unit, unit);
}

EmbeddingTable make_embedding(const LabeledDataset& data,
                              const learners::LearnerConfig& learner,
                              std::uint64_t seed) {
  const learners::TrainedModel model =
      learners::train(data, learner.with_seed(rng::mix64(seed ^ kLearnTag)));
  EmbeddingTable table;
  table.coords = metrics::embed2d(embedding_metric(model), data.features);
  table.labels = data.labels;
  return table;
}

} // namespace

void PhaseOneConfig::validate() const {
  if (runs < 2) throw ConfigError("phase-1 runs must be at least 2");
  check_fraction(test_fraction);
  if (threads < 0) throw ConfigError("threads must be non-negative");
}

void PhaseTwoConfig::validate() const {
  if (runs < 2) throw ConfigError("phase-2 runs must be at least 2");
  check_fraction(test_fraction);
  if (threads < 0) throw ConfigError("threads must be non-negative");
}

std::size_t RelevanceEnsemble::dim() const {
  if (relevances.empty()) throw DataError("ensemble is empty");
  return relevances.front().dim();
}

Vector RelevanceEnsemble::mean_relevance() const {
  const std::size_t d = dim();
  Vector mean(d, 0.0);
  for (const auto& r : relevances)
    for (std::size_t j = 0; j < d; ++j) mean[j] += r[j];
  for (double& v : mean) v /= static_cast<double>(relevances.size());
  return mean;
}

void RelevanceEnsemble::validate() const {
  if (relevances.size() != aucs.size() || relevances.size() != seeds.size())
    throw DimensionError("ensemble per-run records are inconsistent");
  const std::size_t d = dim();
  for (const auto& r : relevances)
    if (r.dim() != d) throw DimensionError("ensemble rows differ in dimension");
  for (const double a : aucs)
    if (!(a >= 0.0 && a <= 1.0)) throw NumericError("AUC outside [0, 1]");
}

AucSummary summarize(const Vector& values) {
  if (values.empty()) throw DataError("cannot summarize an empty sequence");
  AucSummary s;
  for (const double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double acc = 0.0;
    for (const double v : values) acc += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(values.size() - 1));
  }
  return s;
}

void ExperimentSpec::validate() const {
  phase1.validate();
  phase2.validate();
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (mode == Mode::Synthetic) {
    if (d < 2) throw ConfigError("dimension must be at least 2");
    if (!(t >= 0.0)) throw ConfigError("separation t must be non-negative");
    if (!(nu > 0.0)) throw ConfigError("noise scale nu must be positive");
    if (n_per_class < 4) throw ConfigError("n_per_class must be at least 4");
    if (alpha_deg) {
      if (!(*alpha_deg >= 0.0 && *alpha_deg <= 90.0))
        throw ConfigError("alpha-deg must lie in [0, 90]");
    } else if (d < 8) {
      throw ConfigError("benchmark directions require dimension >= 8");
    }
  } else if (csv_path.empty()) {
    throw ConfigError("csv mode requires a dataset path");
  }
}

std::pair<Vector, Vector> ExperimentSpec::directions() const {
  if (alpha_deg) {
    Vector e1(d, 0.0);
    e1[0] = 1.0;
    const double alpha = *alpha_deg * std::numbers::pi / 180.0;
    return {e1, datagen::rotated_direction(e1, alpha, {0, 1})};
  }
  return datagen::benchmark_directions(d);
}

LabeledDataset undersample_balanced(const LabeledDataset& data, std::uint64_t seed) {
  data.validate();
  auto idx1 = class_indices(data, 1);
  auto idx2 = class_indices(data, 2);
  if (idx1.empty() || idx2.empty())
    throw DataError("undersampling needs both classes non-empty");

  const std::size_t m = std::min(idx1.size(), idx2.size());
  Rng rng(seed);
  auto take = [&](std::vector<std::size_t>& idx) {
    if (idx.size() == m) return;
    rng.shuffle(idx);
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
  };
  take(idx1);
  take(idx2);

  std::vector<std::size_t> rows;
  rows.reserve(2 * m);
  rows.insert(rows.end(), idx1.begin(), idx1.end());
  rows.insert(rows.end(), idx2.begin(), idx2.end());
  std::sort(rows.begin(), rows.end());
  return gather_rows(data, rows);
}

SplitResult stratified_split(const LabeledDataset& data, double test_fraction,
                             std::uint64_t seed) {
  data.validate();
  check_fraction(test_fraction);
  if (!data.has_both_classes())
    throw DataError("stratified split needs both classes present");

  const auto idx1 = class_indices(data, 1);
  const auto idx2 = class_indices(data, 2);
  const std::size_t k1 = test_count(idx1.size(), test_fraction);
  const std::size_t k2 = test_count(idx2.size(), test_fraction);

  std::vector<bool> test1, test2;
  if (idx1.size() == idx2.size()) {
    // One shared selection pattern: relabeling the classes then splitting
    // yields the same row partition.
    Rng rng(seed);
    test1 = pick_positions(idx1.size(), k1, rng);
    test2 = test1;
  } else {
    Rng rng1(rng::mix64(seed ^ 0xC1ULL));
    Rng rng2(rng::mix64(seed ^ 0xC2ULL));
    test1 = pick_positions(idx1.size(), k1, rng1);
    test2 = pick_positions(idx2.size(), k2, rng2);
  }

  std::vector<std::size_t> train_rows, test_rows;
  auto assign = [&](const std::vector<std::size_t>& idx, const std::vector<bool>& mask) {
    for (std::size_t p = 0; p < idx.size(); ++p)
      (mask[p] ? test_rows : train_rows).push_back(idx[p]);
  };
  assign(idx1, test1);
  assign(idx2, test2);
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return SplitResult{gather_rows(data, train_rows), gather_rows(data, test_rows)};
}

RelevanceEnsemble run_phase1_case(const GaussianTaskSpec& task,
                                  const PhaseOneConfig& config, int case_id) {
  config.validate();
  return run_case(
      [&task](std::uint64_t run_seed) {
        return datagen::sample_task(task.with_seed(run_seed));
      },
      config.runs, config.test_fraction, config.learner, config.threads,
      config.base_seed, 1, case_id, config.observer);
}

RelevanceEnsemble run_phase1_case(const LabeledDataset& data,
                                  const PhaseOneConfig& config, int case_id) {
  config.validate();
  data.validate();
  if (!data.has_both_classes())
    throw DataError("phase-1 data source must contain both classes");
  return run_case(
      [&data](std::uint64_t run_seed) {
        return undersample_balanced(data, rng::mix64(run_seed ^ kResampleTag));
      },
      config.runs, config.test_fraction, config.learner, config.threads,
      config.base_seed, 1, case_id, config.observer);
}

LabeledDataset build_phase2_dataset(const RelevanceEnsemble& r1,
                                    const RelevanceEnsemble& r2) {
  if (r1.relevances.empty() || r2.relevances.empty())
    throw DataError("both ensembles must be non-empty");
  const std::size_t d = r1.dim();
  if (r2.dim() != d) throw DimensionError("ensembles differ in dimension");

  const std::size_t n = r1.size() + r2.size();
  Matrix features(n, d);
  std::vector<int> labels(n);
  std::size_t row = 0;
  for (const auto& r : r1.relevances) {
    std::copy(r.weights().begin(), r.weights().end(), features.row(row));
    labels[row++] = 1;
  }
  for (const auto& r : r2.relevances) {
    std::copy(r.weights().begin(), r.weights().end(), features.row(row));
    labels[row++] = 2;
  }
  return LabeledDataset{std::move(features), std::move(labels), std::nullopt};
}

RelevanceEnsemble run_phase2(const LabeledDataset& phase2_data,
                             const PhaseTwoConfig& config) {
  config.validate();
  phase2_data.validate();
  if (!phase2_data.has_both_classes())
    throw DataError("phase-2 data must contain both labels");
  return run_case([&phase2_data](std::uint64_t) { return phase2_data; }, config.runs,
                  config.test_fraction, config.learner, config.threads,
                  config.base_seed, 2, 0, config.observer);
}

DseReport run_dse(const ExperimentSpec& spec,
                  const std::optional<std::pair<LabeledDataset, LabeledDataset>>&
                      real_data) {
  spec.validate();

  DseReport report;
  report.config = spec;
  report.config.phase1.base_seed = spec.base_seed;
  report.config.phase2.base_seed = spec.base_seed;
  report.config.phase1.threads = spec.threads;
  report.config.phase2.threads = spec.threads;
  const PhaseOneConfig& p1 = report.config.phase1;
  const PhaseTwoConfig& p2 = report.config.phase2;
  const auto rep_run = static_cast<std::uint64_t>(p1.runs);

  if (spec.mode == ExperimentSpec::Mode::Synthetic) {
    const auto [a1, a2] = spec.directions();
    const GaussianTaskSpec task1(spec.d, spec.t, spec.nu, a1, spec.n_per_class, 0);
    const GaussianTaskSpec task2(spec.d, spec.t, spec.nu, a2, spec.n_per_class, 0);
    report.case1 = run_phase1_case(task1, p1, 1);
    report.case2 = run_phase1_case(task2, p1, 2);

    report.separations = separations::experimental_separation(report.case1, report.case2);
    report.separations.epsilon_p =
        separations::pessimistic_separation(spec.d, spec.t, spec.nu, a1, a2);
    report.separations.epsilon_o = separations::optimistic_separation(a1, a2);
    report.separations.ratio_predicted =
        separations::separation_ratio(spec.d, spec.t, spec.nu);
    report.has_theory = true;

    report.embedding_case1 = make_embedding(
        datagen::sample_task(task1.with_seed(derive_seed(spec.base_seed, 1, 1, rep_run))),
        p1.learner, derive_seed(spec.base_seed, 1, 1, rep_run));
    report.embedding_case2 = make_embedding(
        datagen::sample_task(task2.with_seed(derive_seed(spec.base_seed, 1, 2, rep_run))),
        p1.learner, derive_seed(spec.base_seed, 1, 2, rep_run));
  } else {
    if (!real_data)
      throw ConfigError("csv mode requires the two population datasets");
    report.case1 = run_phase1_case(real_data->first, p1, 1);
    report.case2 = run_phase1_case(real_data->second, p1, 2);
    report.separations = separations::experimental_separation(report.case1, report.case2);
    report.has_theory = false;

    const std::uint64_t s1 = derive_seed(spec.base_seed, 1, 1, rep_run);
    const std::uint64_t s2 = derive_seed(spec.base_seed, 1, 2, rep_run);
    report.embedding_case1 = make_embedding(
        undersample_balanced(real_data->first, rng::mix64(s1 ^ kResampleTag)),
        p1.learner, s1);
    report.embedding_case2 = make_embedding(
        undersample_balanced(real_data->second, rng::mix64(s2 ^ kResampleTag)),
        p1.learner, s2);
  }

  const LabeledDataset phase2_data = build_phase2_dataset(report.case1, report.case2);
  report.phase2 = run_phase2(phase2_data, p2);
  report.embedding_phase2 = make_embedding(
      phase2_data, p2.learner, derive_seed(spec.base_seed, 2, 0, p2.runs));

  report.auc_case1 = summarize(report.case1.aucs);
  report.auc_case2 = summarize(report.case2.aucs);
  report.auc_phase2 = summarize(report.phase2.aucs);
  report.roc_case1 = metrics::mean_roc(report.case1.curves);
  report.roc_case2 = metrics::mean_roc(report.case2.curves);
  report.roc_phase2 = metrics::mean_roc(report.phase2.curves);
  return report;
}

} // namespace dse::pipeline
