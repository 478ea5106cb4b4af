#include <benchmark/benchmark.h>

#include "dse/base.hpp"
#include "dse/datagen.hpp"
#include "dse/learners.hpp"
#include "dse/linalg.hpp"
#include "dse/metrics.hpp"

namespace {

using namespace dse;

datagen::LabeledDataset make_data(std::size_t d, std::size_t n_per_class) {
  const auto a1 = datagen::benchmark_directions(d).first;
  return datagen::sample_task(
      datagen::GaussianTaskSpec(d, 0.25, 1.0, a1, n_per_class, 99));
}

void BM_SymEigen(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  linalg::Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = m(j, i) = rng.next_gaussian();
  for (auto _ : state) benchmark::DoNotOptimize(linalg::sym_eigen(m));
}
BENCHMARK(BM_SymEigen)->Arg(10)->Arg(20);

void BM_SampleTask(benchmark::State& state) {
  const auto a1 = datagen::benchmark_directions(17).first;
  const datagen::GaussianTaskSpec task(17, 0.25, 1.0, a1, 500, 42);
  for (auto _ : state) benchmark::DoNotOptimize(datagen::sample_task(task));
}
BENCHMARK(BM_SampleTask);

void BM_GmlvqTrain(benchmark::State& state) {
  const auto data = make_data(17, 500);
  learners::GmlvqConfig cfg;
  cfg.epochs = static_cast<int>(state.range(0));
  cfg.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(learners::train_gmlvq(data, cfg));
}
BENCHMARK(BM_GmlvqTrain)->Arg(1)->Arg(10);

void BM_SvmTrain(benchmark::State& state) {
  const auto data = make_data(17, 500);
  learners::SvmConfig cfg;
  cfg.epochs = static_cast<int>(state.range(0));
  cfg.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(learners::train_svm(data, cfg));
}
BENCHMARK(BM_SvmTrain)->Arg(1)->Arg(10);

void BM_RocAuc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(11);
  linalg::Vector scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = 1 + static_cast<int>(i % 2);
    scores[i] = rng.next_gaussian() + (labels[i] == 2 ? 0.5 : 0.0);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(metrics::roc_curve(scores, labels));
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(10000);

} // namespace

BENCHMARK_MAIN();
