#include "localis/group.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace localis;

void BM_compose_heisenberg(benchmark::State& state) {
  const GroupDescriptor G = GroupDescriptor::heisenberg(static_cast<int>(state.range(0)));
  GroupElement a(static_cast<std::size_t>(G.dim()), 0.25);
  GroupElement b(static_cast<std::size_t>(G.dim()), -0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compose(G, a, b));
  }
}
BENCHMARK(BM_compose_heisenberg)->Arg(1)->Arg(4)->Arg(16);

void BM_scaled_compose_euclidean(benchmark::State& state) {
  const GroupDescriptor G = GroupDescriptor::euclidean(static_cast<int>(state.range(0)));
  const ScaledElement u{0.5, GroupElement(static_cast<std::size_t>(G.dim()), 0.25)};
  const ScaledElement v{2.0, GroupElement(static_cast<std::size_t>(G.dim()), -0.5)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(scaled_compose(G, u, v));
  }
}
BENCHMARK(BM_scaled_compose_euclidean)->Arg(1)->Arg(8);

void BM_dilate_heisenberg(benchmark::State& state) {
  const GroupDescriptor G = GroupDescriptor::heisenberg(2);
  GroupElement a(static_cast<std::size_t>(G.dim()), 0.75);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dilate(G, 0.5, a));
  }
}
BENCHMARK(BM_dilate_heisenberg);

}  // namespace
