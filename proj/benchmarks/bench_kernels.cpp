#include <benchmark/benchmark.h>

#include "overgrad/overgrad.hpp"

namespace {

using namespace overgrad;

struct Instance {
  Dataset data;
  NetworkState net;
};

Instance make_instance(std::size_t n, std::size_t d, std::size_t m) {
  return {gen_iid_gaussian(n, d, 7), init_network(m, d, 11)};
}

void BM_Preactivations(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 200, state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(preactivations(inst.net, inst.data));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1) * 200);
}
BENCHMARK(BM_Preactivations)->Args({100, 1000})->Args({1000, 5000})->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 200, state.range(1));
  const ForwardPass fp = forward(inst.net, inst.data);
  for (auto _ : state) benchmark::DoNotOptimize(gradient(inst.net, inst.data, fp));
}
BENCHMARK(BM_Gradient)->Args({100, 1000})->Args({1000, 5000})->Unit(benchmark::kMillisecond);

void BM_HInfinity(benchmark::State& state) {
  const Dataset data = gen_iid_gaussian(state.range(0), 200, 7);
  for (auto _ : state) benchmark::DoNotOptimize(h_infinity(data));
}
BENCHMARK(BM_HInfinity)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_HEmpirical(benchmark::State& state) {
  const auto inst = make_instance(state.range(0), 200, state.range(1));
  const ActivationTable table(preactivations(inst.net, inst.data));
  for (auto _ : state) benchmark::DoNotOptimize(h_empirical(inst.data, table));
}
BENCHMARK(BM_HEmpirical)->Args({100, 1000})->Args({1000, 5000})->Unit(benchmark::kMillisecond);

void BM_ExtremeEigenvalues(benchmark::State& state) {
  const GramMatrix h = h_infinity(gen_iid_gaussian(state.range(0), 200, 7));
  for (auto _ : state) benchmark::DoNotOptimize(extreme_eigenvalues(h));
}
BENCHMARK(BM_ExtremeEigenvalues)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_TrackerWarmStart(benchmark::State& state) {
  auto inst = make_instance(state.range(0), 200, 2000);
  const GramMatrix h0 = h_empirical(inst.data, inst.net);
  SpectralTracker tracker;
  tracker.update(h0);
  const auto step = gd_step(inst.net, inst.data, 1e-3);
  const GramMatrix h1 = h_empirical(inst.data, step.net);
  bool flip = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tracker.update(flip ? h0 : h1));
    flip = !flip;
  }
}
BENCHMARK(BM_TrackerWarmStart)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
