// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "uavmec/config.hpp"
#include "uavmec/experiment.hpp"
#include "uavmec/kernels.hpp"

using namespace uavmec;

namespace {

struct Layer {
  std::size_t in_dim, out_dim, batch;
  std::vector<double> w, b, x, y;
  Layer(std::size_t in, std::size_t out, std::size_t batch_size)
      : in_dim(in), out_dim(out), batch(batch_size), w(in * out), b(out), x(in * batch_size),
        y(out * batch_size) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    for (auto* v : {&w, &b, &x})
      for (auto& e : *v) e = n(rng);
  }
};

void dense(benchmark::State& state, kernels::Mode mode) {
  Layer l(64, static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    kernels::dense_forward(mode, l.w, l.b, l.in_dim, l.out_dim, l.x, l.batch, l.y, true);
    benchmark::DoNotOptimize(l.y.data());
  }
  state.SetItemsProcessed(state.iterations() * int64_t(l.in_dim * l.out_dim * l.batch));
}

void BM_DenseSerial(benchmark::State& s) { dense(s, kernels::Mode::serial); }
void BM_DenseParallel(benchmark::State& s) { dense(s, kernels::Mode::parallel); }

// Output layer of the default network (1280 actions) and a hidden layer.
BENCHMARK(BM_DenseSerial)->Args({64, 64})->Args({1280, 1})->Args({1280, 64});
BENCHMARK(BM_DenseParallel)->Args({64, 64})->Args({1280, 1})->Args({1280, 64});

void eval(benchmark::State& state, ExecutionMode mode) {
  SimConfig config;
  config.num_intervals = 200;
  const auto realizations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto row = run_eval(PolicyKind::random, config, 1, realizations, nullptr, {}, mode);
    benchmark::DoNotOptimize(row.mean_pde);
  }
  state.SetItemsProcessed(state.iterations() * int64_t(realizations * config.num_intervals));
}

void BM_EvalSerial(benchmark::State& s) { eval(s, ExecutionMode::serial); }
void BM_EvalParallel(benchmark::State& s) { eval(s, ExecutionMode::parallel); }

BENCHMARK(BM_EvalSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalParallel)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
