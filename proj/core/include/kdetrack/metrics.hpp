#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kdetrack/forecast.hpp"
#include "kdetrack/geometry.hpp"
#include "kdetrack/trajectory.hpp"

namespace kdetrack {

// Per-step absolute pointwise error d(truth(t_i), p_i). Steps that are absent
// or fall outside the truth's time span yield nullopt (with a warning for the latter).
std::vector<std::optional<double>> ape(const Trajectory& truth, std::span<const ForecastStep> forecast,
                                       const Metric& metric);

// Per-step membership of the true position in that step's region.
std::vector<std::optional<bool>> truth_in_hdr(const Trajectory& truth, std::span<const ForecastStep> forecast);

// Fraction of evaluable steps whose true position lies in the region. Returns
// nullopt when no step is evaluable.
std::optional<double> pct_hdr(const Trajectory& truth, std::span<const ForecastStep> forecast);

// Distance from p to the nearest point of the truth polyline, ignoring time.
// Segments are projected in coordinate space and measured with `metric`.
double nearest_point_distance(const Trajectory& truth, const Point& p, const Metric& metric);

struct AcfLag {
  std::size_t lag = 0;
  double value = 0.0;
  bool significant = false;
};

// 1.96 / sqrt(n).
double acf_critical_value(std::size_t n);

// Sample autocorrelation with the 1/n normalisation, lags 0..max_lag. Throws
// DataError on a zero-variance series and ConfigError unless n > max_lag >= 1.
std::vector<AcfLag> error_acf(std::span<const double> series, std::size_t max_lag);

struct IntegratedErrorFit {
  double slope = 0.0;
  double r2 = 0.0;  // uncentred: 1 - SS_res / sum g^2, the usual figure for a line through the origin
  std::vector<double> integral;  // g at each sample
};

// g(tau) = trapezoidal integral of e from the first sample, tau = t - t_first;
// least-squares slope of g ~ slope * tau through the origin.
IntegratedErrorFit integrated_error_fit(std::span<const double> times, std::span<const double> errors);

struct EvalStep {
  std::size_t step = 0;
  double time = 0.0;
  std::optional<double> ape;
  std::optional<bool> in_hdr;
  std::optional<double> nearest_distance;
};

struct EvalReport {
  std::vector<EvalStep> steps;
  double mean_ape = 0.0;
  double std_ape = 0.0;  // sample standard deviation
  std::size_t evaluated_steps = 0;
  std::optional<double> pct_hdr;
  std::vector<AcfLag> acf;
  std::optional<IntegratedErrorFit> fit;
  std::optional<double> mean_nearest_distance;
};

// All metrics at once. Nearest-point distances use the truth restricted to the
// forecast's time window.
EvalReport evaluate_forecast(const Trajectory& truth, std::span<const ForecastStep> forecast, const Metric& metric,
                             std::size_t max_lag = 20);

}  // namespace kdetrack
