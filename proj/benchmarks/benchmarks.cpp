// Micro benchmarks for the hot paths: series math, peak detection, h-index,
// SVR training and end-to-end synthesis + classification.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "trajmine/series.hpp"
#include "trajmine/stats.hpp"
#include "trajmine/svm.hpp"
#include "trajmine/synth.hpp"
#include "trajmine/trajectory.hpp"

namespace {

std::vector<double> random_series(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> values(length);
  for (double& v : values) v = unif(rng);
  return values;
}

void BM_moving_average(benchmark::State& state) {
  std::vector<double> values = random_series(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(trajmine::moving_average(values));
}
BENCHMARK(BM_moving_average)->Arg(32)->Arg(256)->Arg(4096);

void BM_normalize_max(benchmark::State& state) {
  std::vector<double> values = random_series(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(trajmine::normalize_max(values));
}
BENCHMARK(BM_normalize_max)->Arg(256)->Arg(4096);

void BM_detect_peaks(benchmark::State& state) {
  std::vector<double> values =
      trajmine::normalize_max(random_series(static_cast<std::size_t>(state.range(0)), 3));
  for (auto _ : state)
    benchmark::DoNotOptimize(trajmine::detect_peaks(values));
}
BENCHMARK(BM_detect_peaks)->Arg(16)->Arg(64)->Arg(512);

void BM_h_index(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> count(0, 1000);
  std::vector<int> counts(static_cast<std::size_t>(state.range(0)));
  for (int& c : counts) c = count(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(trajmine::h_index(counts));
}
BENCHMARK(BM_h_index)->Arg(50)->Arg(500)->Arg(5000);

void BM_fit_svr(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (int i = 0; i < state.range(0); ++i) {
    std::vector<double> row = {unif(rng), unif(rng), unif(rng), unif(rng)};
    ys.push_back(row[0] - 2.0 * row[2] + 0.1 * unif(rng));
    xs.push_back(std::move(row));
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(trajmine::fit_svr(xs, ys));
}
BENCHMARK(BM_fit_svr)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_generate_classify(benchmark::State& state) {
  trajmine::SynthSpec spec;
  spec.n_authors = static_cast<int>(state.range(0));
  spec.noise_sigma = 0.05;
  spec.seed = 6;
  for (auto _ : state) {
    trajmine::LabeledCorpus labeled = trajmine::generate(spec);
    benchmark::DoNotOptimize(trajmine::classify_corpus(labeled.corpus));
  }
}
BENCHMARK(BM_generate_classify)->Arg(60)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
