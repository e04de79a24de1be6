#include <benchmark/benchmark.h>

#include <vector>

#include "lpplab/lpp.hpp"
#include "lpplab/scaling.hpp"

using namespace lpplab;

static void BM_FillAntidiagonal(benchmark::State& state) {
  const WeightField w(1, 0);
  std::vector<double> row(static_cast<std::size_t>(state.range(0)));
  std::int64_t t = 0;
  for (auto _ : state) {
    w.fill_antidiagonal(1000 + t, 1000, row);
    benchmark::DoNotOptimize(row.data());
    ++t;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FillAntidiagonal)->Arg(1024)->Arg(8192);

static void BM_EvolveFlat(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const WeightField w(2, rep++);
    auto f = evolve_profile(w, Profile::flat(), n, {0, scaled_floor(1.0, n)});
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_EvolveFlat)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_EvolveStationaryPair(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const WeightField w(3, rep++);
    const Profile ps[] = {Profile::stationary(0.45, {w, 0}), Profile::stationary(0.55, {w, 0})};
    auto f = evolve_profiles(w, ps, n, {0, scaled_floor(1.0, n)});
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_EvolveStationaryPair)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_PointLpp(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const WeightField w(4, rep++);
    benchmark::DoNotOptimize(point_lpp(w, {0, 0}, {n, n}));
  }
}
BENCHMARK(BM_PointLpp)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_Geodesic(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const WeightField w(5, rep++);
    benchmark::DoNotOptimize(geodesic(w, {0, 0}, {n, n}));
  }
}
BENCHMARK(BM_Geodesic)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_SheetSample(benchmark::State& state) {
  const std::vector<double> grid{0.0, 0.05, 0.1};
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const WeightField w(6, rep++);
    benchmark::DoNotOptimize(sheet_sample(w, 512, grid, grid, 1.0));
  }
}
BENCHMARK(BM_SheetSample)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
