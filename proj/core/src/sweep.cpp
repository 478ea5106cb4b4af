#include "dse/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dse/base.hpp"

namespace dse::sweep {
namespace {

using pipeline::PhaseOneConfig;
using pipeline::RelevanceEnsemble;

constexpr std::uint64_t kBoundsPhase = 0xB0;
constexpr std::uint64_t kAucSweepPhase = 0xA0;

std::pair<double, double> mean_std(const Vector& v) {
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  if (v.size() > 1) {
    for (const double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() - 1);
  }
  return {mean, std::sqrt(var)};
}

} // namespace

void BoundsConfig::validate() const {
  if (d_grid.empty() || alpha_deg_grid.empty() || t_grid.empty())
    throw ConfigError("sweep grids must be non-empty");
  for (const std::size_t d : d_grid)
    if (d < 2) throw ConfigError("dimension must be at least 2");
  for (const double a : alpha_deg_grid)
    if (!(a >= 0.0 && a <= 90.0)) throw ConfigError("alpha must lie in [0, 90] degrees");
  for (const double t : t_grid)
    if (!(t >= 0.0)) throw ConfigError("separation t must be non-negative");
  if (runs < 2) throw ConfigError("runs must be at least 2");
  if (!(nu > 0.0)) throw ConfigError("noise scale nu must be positive");
  if (n_per_class < 4) throw ConfigError("n_per_class must be at least 4");
}

BoundsResult bound_sandwich_sweep(const BoundsConfig& config) {
  config.validate();
  BoundsResult result;

  for (const std::size_t d : config.d_grid) {
    Vector e1(d, 0.0);
    e1[0] = 1.0;
    for (std::size_t ti = 0; ti < config.t_grid.size(); ++ti) {
      const double t = config.t_grid[ti];
      PhaseOneConfig p1;
      p1.runs = config.runs;
      p1.learner = config.learner;
      p1.resampling = pipeline::Resampling::FreshSynthetic;
      p1.test_fraction = config.test_fraction;
      p1.base_seed = derive_seed(config.base_seed, kBoundsPhase, d, ti);
      p1.threads = config.threads;

      // The case-1 ensemble does not depend on alpha; reuse it across the
      // angle grid.
      const datagen::GaussianTaskSpec task1(d, t, config.nu, e1, config.n_per_class, 0);
      const RelevanceEnsemble ens1 = pipeline::run_phase1_case(task1, p1, 1);

      for (const double alpha_deg : config.alpha_deg_grid) {
        const double alpha = alpha_deg * std::numbers::pi / 180.0;
        const Vector a2 = datagen::rotated_direction(e1, alpha, {0, 1});
        const datagen::GaussianTaskSpec task2(d, t, config.nu, a2, config.n_per_class, 0);
        const RelevanceEnsemble ens2 = pipeline::run_phase1_case(task2, p1, 2);

        BoundsRow row;
        row.d = d;
        row.alpha_deg = alpha_deg;
        row.t = t;
        row.record = separations::experimental_separation(ens1, ens2);
        const separations::SeparationInputs in{d, t, config.nu, alpha};
        row.record.epsilon_p = separations::pessimistic_separation(in);
        row.record.epsilon_o = separations::optimistic_separation(alpha);
        row.record.ratio_predicted = separations::separation_ratio(d, t, config.nu);
        result.rows.push_back(row);
      }
    }
  }

  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const BoundsRow& a, const BoundsRow& b) {
                     if (a.d != b.d) return a.d < b.d;
                     if (a.alpha_deg != b.alpha_deg) return a.alpha_deg < b.alpha_deg;
                     return a.t < b.t;
                   });

  for (const std::size_t d : config.d_grid) {
    for (const double alpha_deg : config.alpha_deg_grid) {
      Vector eps_p, eps_e, delta_e;
      double eps_o = 0.0;
      for (const auto& row : result.rows) {
        if (row.d != d || row.alpha_deg != alpha_deg) continue;
        eps_p.push_back(row.record.epsilon_p);
        eps_e.push_back(row.record.epsilon_e);
        delta_e.push_back(row.record.delta_e);
        eps_o = row.record.epsilon_o;
      }
      BoundsCell cell;
      cell.d = d;
      cell.alpha_deg = alpha_deg;
      std::tie(cell.eps_p_mean, cell.eps_p_std) = mean_std(eps_p);
      std::tie(cell.eps_e_mean, cell.eps_e_std) = mean_std(eps_e);
      cell.eps_o = eps_o;
      cell.delta_e_mean = mean_std(delta_e).first;
      result.cells.push_back(cell);
    }
  }
  return result;
}

std::vector<AucSweepRow> auc_sweep(const pipeline::ExperimentSpec& base,
                                   const Vector& t_grid) {
  if (t_grid.empty()) throw ConfigError("t grid must be non-empty");
  std::vector<AucSweepRow> rows;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    pipeline::ExperimentSpec spec = base;
    spec.mode = pipeline::ExperimentSpec::Mode::Synthetic;
    spec.t = t_grid[ti];
    spec.base_seed = derive_seed(base.base_seed, kAucSweepPhase, ti, 0);
    const pipeline::DseReport report = pipeline::run_dse(spec);
    rows.push_back({spec.t, 1, 1, report.auc_case1.mean, report.auc_case1.stddev});
    rows.push_back({spec.t, 1, 2, report.auc_case2.mean, report.auc_case2.stddev});
    rows.push_back({spec.t, 2, 0, report.auc_phase2.mean, report.auc_phase2.stddev});
  }
  return rows;
}

} // namespace dse::sweep
