#include "localis/localization.hpp"
#include "localis/synthesis.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace localis;

struct Fixture {
  RepParams params;
  WindowSpec W;
  OperatorMatrix A;

  Fixture()
      : params{make_grid(GroupDescriptor::euclidean(1), 1.0 / 16, 8.0), 2.0,
               RepMode::ExactAligned},
        W{make_box_window(params.grid, {1.0}, 2.0)},
        A{multiplication_operator(
            sample_function(params.grid, [](const GroupElement& x) { return std::sin(x[0]); }))} {}
};

void BM_symbol_block(benchmark::State& state) {
  const Fixture fx;
  const ScaledElement s{0.25, {0.5}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(symbol(fx.params, fx.A, s, fx.W));
  }
}
BENCHMARK(BM_symbol_block);

void BM_symbol_field(benchmark::State& state) {
  const Fixture fx;
  std::vector<GroupElement> lattice;
  for (long k = -8; k <= 8; k += 2) lattice.push_back({fx.params.grid.h * static_cast<double>(k)});
  const std::vector<double> levels = {0.5, 0.25, 0.125};
  for (auto _ : state) {
    benchmark::DoNotOptimize(symbol_field(fx.params, fx.A, fx.W, levels, lattice));
  }
}
BENCHMARK(BM_symbol_field);

void BM_enorm_proxy(benchmark::State& state) {
  const Fixture fx;
  const Eigen::MatrixXd block = symbol(fx.params, fx.A, {0.25, {0.5}}, fx.W);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enorm_proxy(block, 1));
  }
}
BENCHMARK(BM_enorm_proxy);

void BM_envelope_sum(benchmark::State& state) {
  const Fixture fx;
  const Partition part = dyadic_partition(fx.params.grid, {-2.0}, {2.0}, 3);
  std::vector<OperatorMatrix> locals(part.cells.size(), fx.A);
  for (auto _ : state) {
    benchmark::DoNotOptimize(envelope_sum(part, locals));
  }
}
BENCHMARK(BM_envelope_sum);

}  // namespace
