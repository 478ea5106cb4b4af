#pragma once

#include <cstdint>
#include <vector>

#include "dse/pipeline.hpp"
#include "dse/separations.hpp"

namespace dse::sweep {

using linalg::Vector;

/// Grid for the separation-bound sweep: case 1 discriminates along e1,
/// case 2 along e1 rotated by alpha in the (e1, e2) plane.
struct BoundsConfig {
  std::vector<std::size_t> d_grid{5, 10, 15, 20};
  Vector alpha_deg_grid{0, 15, 30, 45, 60, 75, 90};
  Vector t_grid{0.25, 0.5, 1.0, 2.0};
  int runs = 30;
  learners::LearnerConfig learner;
  double nu = 1.0;
  std::size_t n_per_class = 500;
  double test_fraction = 0.3;
  std::uint64_t base_seed = 42;
  int threads = 0; // 0 = all available cores

  void validate() const;
};

/// One (d, alpha, t) measurement.
struct BoundsRow {
  std::size_t d = 0;
  double alpha_deg = 0.0;
  double t = 0.0;
  separations::SeparationRecord record;
};

/// Aggregate of one (d, alpha) cell over the t grid: the plot-ready row.
struct BoundsCell {
  std::size_t d = 0;
  double alpha_deg = 0.0;
  double eps_p_mean = 0.0;
  double eps_p_std = 0.0;
  double eps_o = 0.0;
  double eps_e_mean = 0.0;
  double eps_e_std = 0.0;
  double delta_e_mean = 0.0;
};

struct BoundsResult {
  std::vector<BoundsRow> rows;
  std::vector<BoundsCell> cells;
};

/// Runs the phase-1 pipeline per grid point and aggregates the empirical
/// separation against the closed-form bounds; rows ordered by (d, alpha, t).
BoundsResult bound_sandwich_sweep(const BoundsConfig& config);

/// One line of the AUC-versus-t table (phase 2 rows carry case_id 0).
struct AucSweepRow {
  double t = 0.0;
  int phase = 0;
  int case_id = 0;
  double auc_mean = 0.0;
  double auc_std = 0.0;
};

/// Full DSE per t-grid point with the base spec's design; three rows per
/// point (phase 1 case 1, phase 1 case 2, phase 2).
std::vector<AucSweepRow> auc_sweep(const pipeline::ExperimentSpec& base,
                                   const Vector& t_grid);

} // namespace dse::sweep
