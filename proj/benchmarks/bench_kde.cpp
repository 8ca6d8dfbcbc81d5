#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "kdetrack/hdr.hpp"
#include "kdetrack/kde.hpp"

using namespace kdetrack;

namespace {

std::vector<Point> cloud(std::size_t n, std::size_t dim) {
  Rng rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point p(dim);
    for (std::size_t j = 0; j < dim; ++j) p[j] = z(rng);
    pts.push_back(std::move(p));
  }
  return pts;
}

DensityEstimate make_kde(std::size_t n, KernelFamily family) {
  const auto pts = cloud(n, 2);
  return DensityEstimate::build(pts, scott_bandwidth(pts), Kernel1D(family));
}

}  // namespace

static void BM_Evaluate(benchmark::State& state) {
  const auto f = make_kde(static_cast<std::size_t>(state.range(0)), KernelFamily::epanechnikov);
  const Point x{0.1, -0.2};
  for (auto _ : state) benchmark::DoNotOptimize(f.evaluate(x));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Evaluate)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

static void BM_Mode(benchmark::State& state) {
  const auto f = make_kde(static_cast<std::size_t>(state.range(0)), KernelFamily::epanechnikov);
  for (auto _ : state) benchmark::DoNotOptimize(mode(f));
}
BENCHMARK(BM_Mode)->RangeMultiplier(4)->Range(16, 1024);

static void BM_Hdr(benchmark::State& state) {
  auto f = std::make_shared<const DensityEstimate>(make_kde(256, KernelFamily::epanechnikov));
  Rng rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_hdr(f, 0.3, static_cast<std::size_t>(state.range(0)), rng).threshold());
  }
}
BENCHMARK(BM_Hdr)->Arg(1000)->Arg(10000);

static void BM_HdrGaussian(benchmark::State& state) {
  auto f = std::make_shared<const DensityEstimate>(make_kde(256, KernelFamily::gaussian));
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_hdr(f, 0.3, 10000, rng).threshold());
}
BENCHMARK(BM_HdrGaussian);

BENCHMARK_MAIN();
