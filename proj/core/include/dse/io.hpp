#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dse/datagen.hpp"
#include "dse/pipeline.hpp"
#include "dse/sweep.hpp"

namespace dse::io {

/// Parsed dataset file; per-population splits are present when the file
/// carries a population column.
struct DatasetBundle {
  datagen::LabeledDataset combined;
  std::optional<datagen::LabeledDataset> population_a;
  std::optional<datagen::LabeledDataset> population_b;

  bool has_population() const { return population_a.has_value(); }
};

/// CSV with a header: feature columns (any names), required `class` column
/// with values {1, 2}, optional `population` column with values {A, B}.
/// Errors name the data row (1-based) and column.
DatasetBundle parse_dataset_csv(const std::string& text);
DatasetBundle read_dataset(const std::string& path);

/// Header f1..fd,class; 17-significant-digit cells.
void write_dataset_csv(const datagen::LabeledDataset& data, const std::string& path);

/// Everything a run needs, as parsed from the JSON config document.
struct LoadedConfig {
  pipeline::ExperimentSpec spec;
  linalg::Vector sweep_t_grid{0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0};
  sweep::BoundsConfig bounds;
  std::string out_dir = "out";
  bool has_out = false;
  bool has_seed = false;
};

/// Strict parse: unknown keys rejected with their path, required keys
/// (csv.path in csv mode, alpha_deg with rotated directions) enforced.
LoadedConfig parse_experiment_config(const std::string& json_text);
LoadedConfig load_config_file(const std::string& path);

/// DSE_OUT / DSE_SEED apply only where the config file was silent.
void apply_env_overrides(LoadedConfig& config);

/// Propagates spec-level settings into the bounds sweep config; call after
/// flag overrides.
void sync_derived(LoadedConfig& config);

/// Shortest text that round-trips a 64-bit float (17 significant digits).
std::string format_double(double value);

std::string report_to_json(const pipeline::DseReport& report);
pipeline::DseReport report_from_json(const std::string& text);

/// Writes report.json plus the relevance/ROC/embedding/separation CSV
/// tables into dir (created if missing); returns the file names written.
std::vector<std::string> write_report(const pipeline::DseReport& report,
                                      const std::string& dir);

void write_sweep_csv(const std::vector<sweep::AucSweepRow>& rows,
                     const std::string& path);
void write_bounds_csv(const std::vector<sweep::BoundsCell>& cells,
                      const std::string& path);

} // namespace dse::io
