#include <benchmark/benchmark.h>

#include "ndsort/kmeans.hpp"
#include "ndsort/metrics.hpp"
#include "ndsort/rng.hpp"
#include "ndsort/synth.hpp"

namespace {

using namespace ndsort;

ContingencyTable random_table(int n, std::uint64_t seed) {
  Rng rng(seed);
  ContingencyTable t(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      t.at(r, c) = static_cast<std::int64_t>(rng.next_below(1000));
  return t;
}

void BM_SortingAccuracy(benchmark::State& state) {
  const ContingencyTable t = random_table(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sorting_accuracy(t).assigned_sum);
  }
}
BENCHMARK(BM_SortingAccuracy)->Arg(6)->Arg(12)->Arg(64);

void BM_KMeansFit(benchmark::State& state) {
  const CanonicalShape canon = CanonicalShape::defaults();
  const auto neurons = gen_base_neurons(canon, 8, 0.375, 3);
  GeneratorConfig cfg;
  cfg.neuron_count = 8;
  cfg.instance_dev = 2.0 / 16;
  cfg.stream_length = 5000;
  cfg.seed = 5;
  const LabeledStream stream = gen_stream(canon, neurons, cfg);
  std::vector<RawShape> init;
  for (const BaseNeuron& n : gen_base_neurons(canon, 8, 0.375, 11)) {
    init.push_back(n.features);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmeans_fit(stream.raw, init).iterations_used);
  }
}
BENCHMARK(BM_KMeansFit);

void BM_StreamGeneration(benchmark::State& state) {
  const CanonicalShape canon = CanonicalShape::defaults();
  const auto neurons = gen_base_neurons(canon, 8, 0.375, 3);
  GeneratorConfig cfg;
  cfg.neuron_count = 8;
  cfg.stream_length = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen_stream(canon, neurons, cfg).size());
  }
}
BENCHMARK(BM_StreamGeneration)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
