#include <benchmark/benchmark.h>

#include <vector>

#include "ndsort/dendrite.hpp"
#include "ndsort/experiments.hpp"
#include "ndsort/rng.hpp"
#include "ndsort/synth.hpp"

namespace {

using namespace ndsort;

std::vector<FeatureVector> bench_stream(int n) {
  Rng rng(99);
  std::vector<FeatureVector> stream;
  stream.reserve(n);
  for (int i = 0; i < n; ++i) {
    FeatureVector x(kShapeFeatures);
    for (int& v : x) v = 1 + static_cast<int>(rng.next_below(kQuantLevels));
    stream.push_back(std::move(x));
  }
  return stream;
}

void BM_DendriteStep(benchmark::State& state) {
  const int templates = static_cast<int>(state.range(0));
  const DendriteConfig cfg = default_nd_config(2.0 / 16, templates);
  Dendrite d(cfg, 1);
  const auto stream = bench_stream(4096);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.step(stream[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DendriteStep)->Arg(4)->Arg(8)->Arg(12);

void BM_DendriteStepProbSearch(benchmark::State& state) {
  DendriteConfig cfg = default_nd_config(2.0 / 16, static_cast<int>(state.range(0)));
  cfg.prob_search = true;
  Dendrite d(cfg, 1);
  const auto stream = bench_stream(4096);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.step(stream[i++ & 4095]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DendriteStepProbSearch)->Arg(8);

void BM_DendriteInfer(benchmark::State& state) {
  const DendriteConfig cfg = default_nd_config(2.0 / 16, 8);
  Dendrite d(cfg, 1);
  const auto stream = bench_stream(4096);
  for (const auto& x : stream) d.step(x);  // give the weights structure
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.infer(stream[i++ & 4095]).cid);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DendriteInfer);

}  // namespace
