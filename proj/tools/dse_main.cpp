#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "dse/base.hpp"
#include "dse/datagen.hpp"
#include "dse/io.hpp"
#include "dse/learners.hpp"
#include "dse/pipeline.hpp"
#include "dse/sweep.hpp"

namespace {

namespace fs = std::filesystem;
using namespace dse;

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<double> t;
  std::optional<double> alpha_deg;
  std::optional<std::uint64_t> d;
  std::optional<int> runs;
  std::optional<std::string> learner;
  std::optional<int> threads;
  std::optional<std::string> out;
};

void add_common_flags(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON config file");
  sub->add_option("--seed", o.seed, "base RNG seed");
  sub->add_option("--t", o.t, "class separation distance");
  sub->add_option("--alpha-deg", o.alpha_deg,
                  "rotate the case-2 direction by this angle (degrees)");
  sub->add_option("--d", o.d, "feature dimension");
  sub->add_option("--runs", o.runs, "runs per ensemble");
  sub->add_option("--learner", o.learner, "base learner")
      ->check(CLI::IsMember({"gmlvq", "svm"}));
  sub->add_option("--threads", o.threads, "worker cap, 0 = all cores");
  sub->add_option("--out", o.out, "output directory");
}

io::LoadedConfig assemble(const Overrides& o) {
  io::LoadedConfig cfg =
      o.config ? io::load_config_file(*o.config) : io::LoadedConfig{};
  io::apply_env_overrides(cfg);
  if (o.seed) cfg.spec.base_seed = *o.seed;
  if (o.t) cfg.spec.t = *o.t;
  if (o.alpha_deg) cfg.spec.alpha_deg = *o.alpha_deg;
  if (o.d) cfg.spec.d = *o.d;
  if (o.runs) {
    cfg.spec.phase1.runs = *o.runs;
    cfg.spec.phase2.runs = *o.runs;
    cfg.bounds.runs = *o.runs;
  }
  if (o.learner) {
    const auto kind = *o.learner == "svm" ? learners::LearnerKind::Svm
                                          : learners::LearnerKind::Gmlvq;
    cfg.spec.phase1.learner.kind = kind;
    cfg.spec.phase2.learner.kind = kind;
  }
  if (o.threads) cfg.spec.threads = *o.threads;
  if (o.out) cfg.out_dir = *o.out;
  io::sync_derived(cfg);
  return cfg;
}

/// Stages files in a scratch directory beside the target and moves them into
/// place only on success, so failed runs never leave partial output.
class StagedDir {
 public:
  explicit StagedDir(fs::path final_dir)
      : final_(std::move(final_dir)),
        tmp_(final_.string() + ".tmp-" + std::to_string(::getpid())) {
    std::error_code ec;
    fs::remove_all(tmp_, ec);
    fs::create_directories(tmp_, ec);
    if (ec)
      throw DataError("cannot create directory '" + tmp_.string() +
                      "': " + ec.message());
  }
  StagedDir(const StagedDir&) = delete;
  StagedDir& operator=(const StagedDir&) = delete;
  ~StagedDir() {
    std::error_code ec;
    fs::remove_all(tmp_, ec);
  }

  const fs::path& path() const { return tmp_; }

  void commit(const std::vector<std::string>& names) {
    std::error_code ec;
    fs::create_directories(final_, ec);
    if (ec)
      throw DataError("cannot create directory '" + final_.string() +
                      "': " + ec.message());
    for (const auto& name : names) {
      fs::rename(tmp_ / name, final_ / name, ec);
      if (ec)
        throw DataError("cannot move '" + name + "' into '" + final_.string() +
                        "': " + ec.message());
    }
  }

 private:
  fs::path final_;
  fs::path tmp_;
};

void cmd_synth(const io::LoadedConfig& cfg) {
  pipeline::ExperimentSpec spec = cfg.spec;
  spec.mode = pipeline::ExperimentSpec::Mode::Synthetic;
  spec.validate();
  const auto [a1, a2] = spec.directions();
  const datagen::GaussianTaskSpec task1(spec.d, spec.t, spec.nu, a1,
                                        spec.n_per_class, 0);
  const datagen::GaussianTaskSpec task2(spec.d, spec.t, spec.nu, a2,
                                        spec.n_per_class, 0);
  StagedDir stage(cfg.out_dir);
  io::write_dataset_csv(
      datagen::sample_task(task1.with_seed(derive_seed(spec.base_seed, 1, 1, 0))),
      (stage.path() / "case1.csv").string());
  io::write_dataset_csv(
      datagen::sample_task(task2.with_seed(derive_seed(spec.base_seed, 1, 2, 0))),
      (stage.path() / "case2.csv").string());
  stage.commit({"case1.csv", "case2.csv"});
  std::fprintf(stderr, "synth: wrote case1.csv, case2.csv to %s\n",
               cfg.out_dir.c_str());
}

void cmd_dse(const io::LoadedConfig& cfg) {
  std::optional<std::pair<datagen::LabeledDataset, datagen::LabeledDataset>> real;
  if (cfg.spec.mode == pipeline::ExperimentSpec::Mode::Csv) {
    io::DatasetBundle bundle = io::read_dataset(cfg.spec.csv_path);
    if (!bundle.has_population())
      throw DataError(cfg.spec.csv_path +
                      ": csv mode requires a 'population' column with values A and B");
    real.emplace(std::move(*bundle.population_a), std::move(*bundle.population_b));
  }
  const pipeline::DseReport report = pipeline::run_dse(cfg.spec, real);
  StagedDir stage(cfg.out_dir);
  const auto names = io::write_report(report, stage.path().string());
  stage.commit(names);
  std::fprintf(stderr,
               "dse: phase1 case1 AUC %.4f, case2 AUC %.4f, phase2 AUC %.4f; "
               "%zu files in %s\n",
               report.auc_case1.mean, report.auc_case2.mean,
               report.auc_phase2.mean, names.size(), cfg.out_dir.c_str());
}

void cmd_sweep(const io::LoadedConfig& cfg) {
  const auto rows = sweep::auc_sweep(cfg.spec, cfg.sweep_t_grid);
  StagedDir stage(cfg.out_dir);
  io::write_sweep_csv(rows, (stage.path() / "sweep.csv").string());
  stage.commit({"sweep.csv"});
  std::fprintf(stderr, "sweep: %zu rows in %s/sweep.csv\n", rows.size(),
               cfg.out_dir.c_str());
}

void cmd_bounds(const io::LoadedConfig& cfg) {
  const sweep::BoundsResult result = sweep::bound_sandwich_sweep(cfg.bounds);
  StagedDir stage(cfg.out_dir);
  io::write_bounds_csv(result.cells, (stage.path() / "bounds.csv").string());
  stage.commit({"bounds.csv"});
  std::fprintf(stderr, "bounds: %zu cells in %s/bounds.csv\n",
               result.cells.size(), cfg.out_dir.c_str());
}

void cmd_train(const io::LoadedConfig& cfg, const std::string& data_path,
               bool save_model) {
  const io::DatasetBundle bundle = io::read_dataset(data_path);
  const auto learner = cfg.spec.phase1.learner.with_seed(cfg.spec.base_seed);
  const learners::TrainedModel model = learners::train(bundle.combined, learner);
  const learners::RelevanceVector relevances = learners::relevance_of(model);
  for (std::size_t j = 0; j < relevances.dim(); ++j)
    std::printf("%s\n", io::format_double(relevances[j]).c_str());
  if (save_model) {
    StagedDir stage(cfg.out_dir);
    const std::string text = learners::model_to_json(model);
    std::ofstream outfile((stage.path() / "model.json").string(),
                          std::ios::binary);
    outfile << text;
    outfile.flush();
    if (!outfile.good())
      throw DataError("write failure under '" + cfg.out_dir + "'");
    outfile.close();
    stage.commit({"model.json"});
    std::fprintf(stderr, "train: model.json in %s\n", cfg.out_dir.c_str());
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discriminative subspace emersion over classifier ensembles"};
  app.require_subcommand(1);

  Overrides o;
  std::string train_data;

  CLI::App* synth =
      app.add_subcommand("synth", "generate the two-case synthetic datasets");
  CLI::App* dse_cmd =
      app.add_subcommand("dse", "run both phases and write the full report");
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "AUC versus separation distance table");
  CLI::App* bounds_cmd =
      app.add_subcommand("bounds", "empirical versus closed-form separation grid");
  CLI::App* train_cmd =
      app.add_subcommand("train", "fit one model on a CSV and print relevances");
  for (CLI::App* sub : {synth, dse_cmd, sweep_cmd, bounds_cmd, train_cmd})
    add_common_flags(sub, o);
  train_cmd->add_option("--data", train_data, "dataset CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const io::LoadedConfig cfg = assemble(o);
    if (synth->parsed())
      cmd_synth(cfg);
    else if (dse_cmd->parsed())
      cmd_dse(cfg);
    else if (sweep_cmd->parsed())
      cmd_sweep(cfg);
    else if (bounds_cmd->parsed())
      cmd_bounds(cfg);
    else
      cmd_train(cfg, train_data, o.out.has_value());
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}
