// Acceptance gate for the discriminative-subspace pipeline: eleven
// numbered criteria, one PASS/FAIL line each, all tolerances pinned here.
// argv[1] must name the CLI binary (used by the determinism criterion).

#include <dse/base.hpp>
#include <dse/datagen.hpp>
#include <dse/io.hpp>
#include <dse/learners.hpp>
#include <dse/linalg.hpp>
#include <dse/metrics.hpp>
#include <dse/pipeline.hpp>
#include <dse/separations.hpp>
#include <dse/sweep.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dse;
using linalg::Matrix;
using linalg::Vector;

namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int criterion, bool ok, const std::string& title,
            const std::string& detail) {
  if (!ok) ++g_failures;
  std::printf("%s criterion %2d: %s [%s]\n", ok ? "PASS" : "FAIL", criterion,
              title.c_str(), detail.c_str());
  std::fflush(stdout);
}

void progress(const std::string& note) {
  std::fprintf(stderr, "[acceptance] %s\n", note.c_str());
  std::fflush(stderr);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Criteria 1 + 2: AUC sweep over the separation grid, both learners.

struct SweepOutcome {
  int dominated_points = 0;
  int total_points = 0;
  double phase1_case1_at_smallest_t = 0.0;
  double phase1_case2_at_smallest_t = 0.0;
};

SweepOutcome run_learner_sweep(learners::LearnerKind kind, const Vector& grid) {
  pipeline::ExperimentSpec spec;
  spec.d = 17;
  spec.nu = 1.0;
  spec.n_per_class = 500;
  spec.base_seed = 42;
  spec.phase1.runs = 50;
  spec.phase2.runs = 50;
  spec.phase1.learner.kind = kind;
  spec.phase2.learner.kind = kind;
  const auto rows = sweep::auc_sweep(spec, grid);

  SweepOutcome out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double c1 = 0.0, c2 = 0.0, p2 = 0.0;
    for (const auto& row : rows) {
      if (row.t != grid[g]) continue;
      if (row.phase == 1 && row.case_id == 1) c1 = row.auc_mean;
      if (row.phase == 1 && row.case_id == 2) c2 = row.auc_mean;
      if (row.phase == 2) p2 = row.auc_mean;
    }
    ++out.total_points;
    if (p2 > c1 && p2 > c2) ++out.dominated_points;
    if (g == 0) {
      out.phase1_case1_at_smallest_t = c1;
      out.phase1_case2_at_smallest_t = c2;
    }
  }
  return out;
}

void criteria_1_and_2() {
  const Vector grid{0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0};
  progress("criterion 1: metric-learner sweep over 7 separation points "
           "(50 runs per ensemble, d=17)...");
  const auto gmlvq = run_learner_sweep(learners::LearnerKind::Gmlvq, grid);
  progress("criterion 1: linear-margin sweep over the same grid...");
  const auto svm = run_learner_sweep(learners::LearnerKind::Svm, grid);

  const bool ok1 = gmlvq.dominated_points >= 6 && svm.dominated_points >= 6;
  report(1, ok1,
         "mean phase-2 AUC exceeds both phase-1 AUCs at >= 6 of 7 grid "
         "points for both learners",
         "gmlvq " + std::to_string(gmlvq.dominated_points) + "/7, svm " +
             std::to_string(svm.dominated_points) + "/7");

  const double lo = 0.45, hi = 0.62;
  const double vals[] = {
      gmlvq.phase1_case1_at_smallest_t, gmlvq.phase1_case2_at_smallest_t,
      svm.phase1_case1_at_smallest_t, svm.phase1_case2_at_smallest_t};
  bool ok2 = true;
  for (double v : vals) ok2 = ok2 && v >= lo && v <= hi;
  report(2, ok2,
         "phase-1 AUC is near chance (in [0.45, 0.62]) at the smallest "
         "separation for both cases and learners",
         "gmlvq " + fmt(vals[0]) + "/" + fmt(vals[1]) + ", svm " +
             fmt(vals[2]) + "/" + fmt(vals[3]));
}

// ---------------------------------------------------------------------------
// Criterion 3: the top-8 phase-2 mean relevances recover the 8 designed
// features in >= 8 of 10 repetitions.

int criterion_3_hits(learners::LearnerKind kind, const char* name) {
  int hits = 0;
  for (int rep = 0; rep < 10; ++rep) {
    progress("criterion 3: " + std::string(name) + " repetition " +
             std::to_string(rep + 1) + "/10...");
    pipeline::ExperimentSpec spec;  // d=17, t=0.25, 500/class, 100 runs
    spec.base_seed = 101 + static_cast<std::uint64_t>(rep);
    spec.phase1.learner.kind = kind;
    spec.phase2.learner.kind = kind;
    const auto rpt = pipeline::run_dse(spec);
    const Vector mean = rpt.phase2.mean_relevance();
    std::vector<std::size_t> order(mean.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });
    const std::set<std::size_t> top8(order.begin(), order.begin() + 8);
    const std::set<std::size_t> designed{0, 1, 2, 3, 4, 5, 6, 7};
    if (top8 == designed) ++hits;
  }
  return hits;
}

void criterion_3() {
  const int svm_hits = criterion_3_hits(learners::LearnerKind::Svm, "svm");
  const int gmlvq_hits = criterion_3_hits(learners::LearnerKind::Gmlvq, "gmlvq");
  const int best = std::max(svm_hits, gmlvq_hits);
  report(3, best >= 8,
         "top-8 phase-2 mean relevances match the 8 differing features in "
         ">= 8 of 10 seeds",
         "svm ensembles " + std::to_string(svm_hits) +
             "/10, gmlvq ensembles " + std::to_string(gmlvq_hits) +
             "/10 exact set matches");
}

// ---------------------------------------------------------------------------
// Criterion 4: empirical separation sandwiched by the closed-form bounds
// on the full (d, alpha) grid, averaged over the t grid.

void criterion_4() {
  progress("criterion 4: separation-bound grid (2 dims x 6 angles x 4 "
           "separations, 30 runs each)...");
  sweep::BoundsConfig config;
  config.d_grid = {5, 20};
  config.alpha_deg_grid = {15, 30, 45, 60, 75, 90};
  config.t_grid = {0.25, 0.5, 1.0, 2.0};
  config.runs = 30;
  const auto result = sweep::bound_sandwich_sweep(config);

  int bad = 0;
  double worst_lower = std::numeric_limits<double>::infinity();
  double worst_upper = 0.0;
  std::string first_bad;
  for (const auto& cell : result.cells) {
    const double lower = cell.eps_e_mean / cell.eps_p_mean;
    const double upper = cell.eps_e_mean / cell.eps_o;
    worst_lower = std::min(worst_lower, lower);
    worst_upper = std::max(worst_upper, upper);
    const bool ok = cell.eps_e_mean >= 0.9 * cell.eps_p_mean &&
                    cell.eps_e_mean <= 1.1 * cell.eps_o;
    if (!ok && ++bad == 1)
      first_bad = " first bad d=" + std::to_string(cell.d) + " alpha=" +
                  fmt(cell.alpha_deg) + " eps_e=" + fmt(cell.eps_e_mean) +
                  " eps_p=" + fmt(cell.eps_p_mean) + " eps_o=" + fmt(cell.eps_o);
  }
  report(4, bad == 0,
         "per cell, eps_e >= 0.9 eps_p and eps_e <= 1.1 eps_o (metric "
         "learner, 12 cells)",
         "min eps_e/eps_p " + fmt(worst_lower) + ", max eps_e/eps_o " +
             fmt(worst_upper) + first_bad);
}

// ---------------------------------------------------------------------------
// Criterion 5: closed-form spot values and the ratio identity.

void criterion_5() {
  const double tol = 1e-12;
  const double spot_p =
      separations::pessimistic_separation({5, 1.0, 1.0, kPi / 2});
  const double want_p = std::sqrt(2.0) * 0.25 / 5.25;
  const double spot_o = separations::optimistic_separation(kPi / 4);
  const double want_o = std::sqrt(2.0) / 2.0;

  double max_gap = 0.0;
  Rng rng(505u);
  for (int i = 0; i < 1000; ++i) {
    separations::SeparationInputs in;
    in.d = 2 + rng.next_below(39);
    in.t = 0.01 + 4.99 * rng.next_double();
    in.nu = 0.2 + 2.8 * rng.next_double();
    in.alpha = (kPi / 2) * rng.next_double();
    const double lhs = separations::pessimistic_separation(in);
    const double rhs = separations::separation_ratio(in) *
                       separations::optimistic_separation(in.alpha);
    max_gap = std::max(max_gap, std::abs(lhs - rhs));
  }

  const bool ok = std::abs(spot_p - want_p) <= tol &&
                  std::abs(spot_o - want_o) <= tol && max_gap <= tol;
  report(5, ok,
         "closed-form spot values and eps_p = ratio * eps_o over 1000 "
         "random points, 1e-12",
         "spot gaps " + fmt(std::abs(spot_p - want_p)) + "/" +
             fmt(std::abs(spot_o - want_o)) + ", max identity gap " +
             fmt(max_gap));
}

// ---------------------------------------------------------------------------
// Criterion 6: diagonal of a unit-trace PSD matrix equals its
// eigen-expansion sum_k lambda_k v_{jk}^2.

void criterion_6() {
  Rng rng(606u);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = 2 + rng.next_below(19);
    Matrix omega(d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) omega(r, c) = rng.next_gaussian();
    Matrix lambda = omega.transposed() * omega;
    const double tr = lambda.trace();
    for (double& v : lambda.data()) v /= tr;

    const auto eig = linalg::sym_eigen(lambda);
    for (std::size_t j = 0; j < d; ++j) {
      double expansion = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        expansion += eig.eigenvalues[k] * eig.eigenvectors(j, k) *
                     eig.eigenvectors(j, k);
      worst = std::max(worst, std::abs(expansion - lambda(j, j)));
    }
  }
  report(6, worst <= 1e-10,
         "diag of 100 random unit-trace PSD matrices (d <= 20) matches the "
         "eigen-expansion within 1e-10",
         "max abs gap " + fmt(worst));
}

// ---------------------------------------------------------------------------
// Criterion 7: analytic metric-learner gradients against central finite
// differences on 50 random configurations.

double perturbed_cost(const learners::GmlvqModel& model,
                      std::vector<learners::Prototype> protos, Matrix omega,
                      const Vector& x, int label) {
  learners::GmlvqModel probe(std::move(protos), std::move(omega),
                             model.config(), {});
  return learners::gmlvq_sample_cost(probe, x, label);
}

void criterion_7() {
  progress("criterion 7: gradient finite-difference audit (50 configs)...");
  Rng rng(707u);
  const double h = 1e-5;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 2 + rng.next_below(9);
    const int per_class = trial % 3 == 0 ? 2 : 1;
    std::vector<learners::Prototype> protos;
    for (int c = 1; c <= 2; ++c)
      for (int p = 0; p < per_class; ++p) {
        learners::Prototype proto;
        proto.class_id = c;
        proto.w.resize(d);
        for (auto& v : proto.w) v = rng.next_gaussian();
        protos.push_back(proto);
      }
    Matrix omega(d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        omega(r, c) = rng.next_gaussian() / std::sqrt(static_cast<double>(d));
    learners::GmlvqModel model(protos, omega, learners::GmlvqConfig{}, {});

    Vector x(d);
    for (auto& v : x) v = rng.next_gaussian();
    const int label = trial % 2 ? 2 : 1;

    const auto grads = learners::gmlvq_sample_gradients(model, x, label);

    Vector analytic, numeric;
    auto push_pair = [&](double a, double n) {
      analytic.push_back(a);
      numeric.push_back(n);
    };
    for (std::size_t which = 0; which < 2; ++which) {
      const std::size_t idx = which == 0 ? grads.p_index : grads.q_index;
      const Vector& g = which == 0 ? grads.d_wp : grads.d_wq;
      for (std::size_t j = 0; j < d; ++j) {
        auto plus = protos, minus = protos;
        plus[idx].w[j] += h;
        minus[idx].w[j] -= h;
        const double fd = (perturbed_cost(model, plus, omega, x, label) -
                           perturbed_cost(model, minus, omega, x, label)) /
                          (2 * h);
        push_pair(g[j], fd);
      }
    }
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        Matrix plus = omega, minus = omega;
        plus(r, c) += h;
        minus(r, c) -= h;
        const double fd = (perturbed_cost(model, protos, plus, x, label) -
                           perturbed_cost(model, protos, minus, x, label)) /
                          (2 * h);
        push_pair(grads.d_omega(r, c), fd);
      }

    double gap2 = 0.0, ref2 = 0.0;
    for (std::size_t j = 0; j < analytic.size(); ++j) {
      gap2 += (analytic[j] - numeric[j]) * (analytic[j] - numeric[j]);
      ref2 += numeric[j] * numeric[j];
    }
    const double rel = std::sqrt(gap2) / std::max(std::sqrt(ref2), 1e-12);
    worst_rel = std::max(worst_rel, rel);
  }
  report(7, worst_rel < 1e-4,
         "analytic gradients match central differences (step 1e-5) with "
         "relative error < 1e-4 on 50 configs (d <= 10)",
         "max relative error " + fmt(worst_rel));
}

// ---------------------------------------------------------------------------
// Criterion 8: trace-1 and PSD invariants of the learned metric hold
// across a full pipeline run, sampled every 10 updates.

void criterion_8() {
  progress("criterion 8: metric invariants across a full run...");
  std::size_t calls = 0;
  std::size_t violations = 0;
  double worst_trace_gap = 0.0;
  double lowest_eigenvalue = std::numeric_limits<double>::infinity();

  learners::TrainObserver observer;
  observer.every_n_updates = 10;
  observer.on_update = [&](const Matrix& omega) {
    ++calls;
    const Matrix lambda = omega.transposed() * omega;
    const double trace_gap = std::abs(lambda.trace() - 1.0);
    const auto eig = linalg::sym_eigen(lambda);
    const double min_eig = eig.eigenvalues.back();
    worst_trace_gap = std::max(worst_trace_gap, trace_gap);
    lowest_eigenvalue = std::min(lowest_eigenvalue, min_eig);
    if (trace_gap > 1e-10 || min_eig < -1e-10) ++violations;
  };

  pipeline::ExperimentSpec spec;
  spec.d = 10;
  spec.t = 0.5;
  spec.n_per_class = 100;
  spec.phase1.runs = 10;
  spec.phase2.runs = 10;
  spec.base_seed = 7;
  spec.phase1.observer = &observer;
  spec.phase2.observer = &observer;
  (void)pipeline::run_dse(spec);

  report(8, calls > 0 && violations == 0,
         "every sampled post-update metric has trace 1 within 1e-10 and min "
         "eigenvalue >= -1e-10",
         std::to_string(calls) + " samples, max trace gap " +
             fmt(worst_trace_gap) + ", min eigenvalue " +
             fmt(lowest_eigenvalue));
}

// ---------------------------------------------------------------------------
// Criterion 9: threshold-sweep AUC equals the pair-counting oracle.

void criterion_9() {
  Rng rng(909u);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.next_below(499);
    Vector scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.next_below(13)) / 4.0;  // heavy ties
      labels[i] = rng.next_double() < 0.5 ? 1 : 2;
    }
    labels[0] = 1;  // both classes present
    labels[n - 1] = 2;

    const double swept = metrics::roc_curve(scores, labels).auc;

    double wins = 0.0;
    std::size_t n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != 1) continue;
      ++n1;
      for (std::size_t j = 0; j < n; ++j) {
        if (labels[j] != 2) continue;
        if (scores[j] > scores[i])
          wins += 1.0;
        else if (scores[j] == scores[i])
          wins += 0.5;
      }
    }
    for (std::size_t j = 0; j < n; ++j) n2 += labels[j] == 2 ? 1 : 0;
    const double counted = wins / (static_cast<double>(n1) * n2);
    worst = std::max(worst, std::abs(swept - counted));
  }
  report(9, worst <= 1e-12,
         "threshold-sweep AUC equals pair-counting AUC within 1e-12 on 200 "
         "tied score sets (n <= 500)",
         "max abs gap " + fmt(worst));
}

// ---------------------------------------------------------------------------
// Criterion 10: Monte-Carlo KL estimate agrees with the closed form.

void criterion_10() {
  const auto est = separations::kl_monte_carlo(5, 1.0, 1.0, 100000, 2026u);
  const double want = separations::kl_gamma_squared(1.0, 1.0);
  const double gap = std::abs(est.mean - want);
  report(10, est.std_error > 0.0 && gap <= 3.0 * est.std_error,
         "1e5-sample KL estimate at (d=5, t=1, nu=1) is within 3 standard "
         "errors of 0.5",
         "estimate " + fmt(est.mean) + ", se " + fmt(est.std_error) +
             ", gap " + fmt(gap));
}

// ---------------------------------------------------------------------------
// Criterion 11: two CLI invocations with the same config and seed produce
// byte-identical report documents.

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return {};
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void criterion_11(const char* cli) {
  if (cli == nullptr) {
    report(11, false,
           "two identical CLI runs write byte-identical report.json",
           "no CLI binary path supplied as argv[1]");
    return;
  }
  progress("criterion 11: running the CLI twice...");
  const fs::path base = fs::temp_directory_path() / "dse_acceptance_runs";
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path cfg = base / "config.json";
  {
    std::ofstream out(cfg);
    out << R"({"seed": 7,
               "synthetic": {"d": 10, "t": 0.5, "n_per_class": 80},
               "phase1": {"runs": 6}})";
  }

  bool ran = true;
  for (const char* leg : {"a", "b"}) {
    const std::string cmd = std::string("\"") + cli + "\" dse --config \"" +
                            cfg.string() + "\" --out \"" +
                            (base / leg).string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) ran = false;
  }
  const std::string first = read_bytes(base / "a" / "report.json");
  const std::string second = read_bytes(base / "b" / "report.json");
  const bool ok = ran && !first.empty() && first == second;
  report(11, ok, "two identical CLI runs write byte-identical report.json",
         ran ? (std::to_string(first.size()) + " bytes, " +
                (first == second ? "identical" : "DIFFERENT"))
             : "CLI invocation failed");
  fs::remove_all(base);
}

}  // namespace

int main(int argc, char** argv) {
  criteria_1_and_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11(argc > 1 ? argv[1] : nullptr);

  std::printf("acceptance: %d of 11 criteria passed\n", 11 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
