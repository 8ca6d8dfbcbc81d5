#include <benchmark/benchmark.h>

#include "kdetrack/forecast.hpp"
#include "kdetrack/synthgen.hpp"

using namespace kdetrack;

static void BM_ForecastLoiter(benchmark::State& state) {
  Rng rng(7);
  const auto run = generate_loiter(LoiterSpec::default_six(), rng);
  ForecastConfig cfg;
  cfg.epsilon = 0.25;
  cfg.theta = 1.0;
  cfg.dt = 0.5;
  cfg.horizon = 10.0;
  cfg.bandwidth = BandwidthVector({0.3, 0.3});
  cfg.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_forecast(run.noisy, cfg).steps.size());
}
BENCHMARK(BM_ForecastLoiter)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

static void BM_ForecastLoiterPathfinding(benchmark::State& state) {
  Rng rng(7);
  const auto run = generate_loiter(LoiterSpec::default_six(), rng);
  ForecastConfig cfg;
  cfg.epsilon = 0.25;
  cfg.theta = 1.0;
  cfg.dt = 0.25;
  cfg.horizon = 5.0;
  cfg.bandwidth = BandwidthVector({0.3, 0.3});
  cfg.grid_cells = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_forecast(run.noisy, cfg).steps.size());
}
BENCHMARK(BM_ForecastLoiterPathfinding)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_ForecastLorenz(benchmark::State& state) {
  Rng rng(1);
  const auto run = generate_lorenz(LorenzSpec{}, rng);
  ForecastConfig cfg;
  cfg.epsilon = 3.0;
  cfg.theta = 1.0;
  cfg.dt = 0.1;
  cfg.horizon = 10.1;
  for (auto _ : state) benchmark::DoNotOptimize(run_forecast(run.noisy, cfg).steps.size());
}
BENCHMARK(BM_ForecastLorenz)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
