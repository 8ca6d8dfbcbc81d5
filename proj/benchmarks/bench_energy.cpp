#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "kdetrack/energy.hpp"

using namespace kdetrack;

namespace {

std::vector<Observation> ring(std::size_t n) {
  std::vector<Observation> obs;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    obs.push_back({static_cast<double>(k), Point{5.0 + 4.0 * std::cos(a), 5.0 + 4.0 * std::sin(a)}});
  }
  return obs;
}

}  // namespace

static void BM_FieldBuild(benchmark::State& state) {
  const Grid grid(Point{0, 0}, Point{10, 10}, {static_cast<std::size_t>(state.range(0)),
                                               static_cast<std::size_t>(state.range(0))});
  const auto history = ring(500);
  const std::vector<double> sigma{1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(EnergyField::build(history, LagrangianKind::gaussian_wells, sigma, grid).value(0));
  }
}
BENCHMARK(BM_FieldBuild)->Arg(50)->Arg(100)->Arg(200);

static void BM_MinEnergyPath(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid grid(Point{0, 0}, Point{10, 10}, {n, n});
  const std::vector<double> sigma{1.0};
  const auto field = EnergyField::build(ring(200), LagrangianKind::gaussian_wells, sigma, grid);
  for (auto _ : state) benchmark::DoNotOptimize(min_energy_path(field, nullptr, Point{9, 5}, Point{1, 5}).cost);
}
BENCHMARK(BM_MinEnergyPath)->Arg(50)->Arg(100)->Arg(200);

static void BM_Densify(benchmark::State& state) {
  const Grid grid(Point{0, 0}, Point{10, 10}, {100, 100});
  const std::vector<double> sigma{1.0};
  const auto history = ring(400);
  const auto field = EnergyField::build(history, LagrangianKind::gaussian_wells, sigma, grid);
  std::vector<Observation> sparse;
  for (std::size_t k = 0; k < history.size(); k += 20) sparse.push_back(history[k]);
  for (auto _ : state) benchmark::DoNotOptimize(densify(sparse, &field, nullptr, 1.0).size());
}
BENCHMARK(BM_Densify);

BENCHMARK_MAIN();
