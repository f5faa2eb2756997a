#include "localis/representation.hpp"
#include "localis/operators.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace localis;

RepParams bench_params(double h) {
  RepParams params;
  params.grid = make_grid(GroupDescriptor::euclidean(1), h, 8.0);
  return params;
}

void BM_act_vector(benchmark::State& state) {
  const RepParams params = bench_params(1.0 / state.range(0));
  const SampledFunction f = sample_function(
      params.grid, [](const GroupElement& x) { return std::exp(-x[0] * x[0]); });
  const ScaledElement s{0.5, {0.25}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(act(params, s, f));
  }
}
BENCHMARK(BM_act_vector)->Arg(16)->Arg(64)->Arg(256);

void BM_act_matrix(benchmark::State& state) {
  const RepParams params = bench_params(1.0 / state.range(0));
  const ScaledElement s{0.5, {0.25}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(act_matrix(params, s));
  }
}
BENCHMARK(BM_act_matrix)->Arg(16)->Arg(64);

void BM_double_act(benchmark::State& state) {
  const RepParams params = bench_params(1.0 / state.range(0));
  const OperatorMatrix A = multiplication_operator(
      sample_function(params.grid, [](const GroupElement& x) { return std::sin(x[0]); }));
  const ScaledElement l{0.5, {0.25}};
  const ScaledElement r{0.25, {-0.5}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(double_act(params, l, r, A));
  }
}
BENCHMARK(BM_double_act)->Arg(16)->Arg(64);

}  // namespace
