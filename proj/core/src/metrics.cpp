#include "kdetrack/metrics.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "kdetrack/errors.hpp"

namespace kdetrack {

std::vector<std::optional<double>> ape(const Trajectory& truth, std::span<const ForecastStep> forecast,
                                       const Metric& metric) {
  std::vector<std::optional<double>> out;
  out.reserve(forecast.size());
  for (const auto& step : forecast) {
    if (!step.present()) {
      out.emplace_back();
      continue;
    }
    const auto actual = truth.position_at(step.time);
    if (!actual) {
      spdlog::warn("ape: truth does not cover t = {}; step {} skipped", step.time, step.step);
      out.emplace_back();
      continue;
    }
    out.emplace_back(distance(*actual, step.estimate->prediction, metric));
  }
  return out;
}

std::vector<std::optional<bool>> truth_in_hdr(const Trajectory& truth, std::span<const ForecastStep> forecast) {
  std::vector<std::optional<bool>> out;
  out.reserve(forecast.size());
  for (const auto& step : forecast) {
    const auto actual = step.present() ? truth.position_at(step.time) : std::nullopt;
    if (!actual) {
      out.emplace_back();
      continue;
    }
    out.emplace_back(step.estimate->region.contains(*actual));
  }
  return out;
}

std::optional<double> pct_hdr(const Trajectory& truth, std::span<const ForecastStep> forecast) {
  std::size_t total = 0;
  std::size_t inside = 0;
  for (const auto& flag : truth_in_hdr(truth, forecast)) {
    if (!flag) continue;
    ++total;
    if (*flag) ++inside;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(inside) / static_cast<double>(total);
}

double nearest_point_distance(const Trajectory& truth, const Point& p, const Metric& metric) {
  if (truth.empty()) throw DataError("nearest_point_distance: empty truth");
  require_dimension(truth.dim(), p.dim(), "nearest_point_distance");
  double best = distance(truth.front().x, p, metric);
  for (std::size_t k = 1; k < truth.size(); ++k) {
    const Point& a = truth[k - 1].x;
    const Point& b = truth[k].x;
    double len2 = 0.0;
    double dot = 0.0;
    for (std::size_t j = 0; j < p.dim(); ++j) {
      len2 += (b[j] - a[j]) * (b[j] - a[j]);
      dot += (p[j] - a[j]) * (b[j] - a[j]);
    }
    const double s = len2 > 0.0 ? std::clamp(dot / len2, 0.0, 1.0) : 0.0;
    Point foot = a;
    for (std::size_t j = 0; j < p.dim(); ++j) foot[j] += s * (b[j] - a[j]);
    best = std::min(best, distance(foot, p, metric));
  }
  return best;
}

double acf_critical_value(std::size_t n) { return 1.96 / std::sqrt(static_cast<double>(n)); }

std::vector<AcfLag> error_acf(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (max_lag < 1 || n <= max_lag) throw ConfigError("error_acf: need series length > max_lag >= 1");
  double mean = 0.0;
  for (double e : series) mean += e;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double e : series) denom += (e - mean) * (e - mean);
  if (!(denom > 0.0)) throw DataError("error_acf: zero-variance series, autocorrelation undefined");
  const double critical = acf_critical_value(n);
  std::vector<AcfLag> out;
  out.reserve(max_lag + 1);
  out.push_back({0, 1.0, true});
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) num += (series[t] - mean) * (series[t + k] - mean);
    const double r = std::clamp(num / denom, -1.0, 1.0);
    out.push_back({k, r, std::abs(r) > critical});
  }
  return out;
}

IntegratedErrorFit integrated_error_fit(std::span<const double> times, std::span<const double> errors) {
  if (times.size() != errors.size()) throw DataError("integrated_error_fit: times and errors differ in length");
  if (times.size() < 3) throw DataError("integrated_error_fit: need at least 3 samples");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw DataError("integrated_error_fit: times must be strictly increasing");
  }
  IntegratedErrorFit fit;
  fit.integral.assign(times.size(), 0.0);
  for (std::size_t k = 1; k < times.size(); ++k) {
    fit.integral[k] = fit.integral[k - 1] + 0.5 * (errors[k - 1] + errors[k]) * (times[k] - times[k - 1]);
  }
  double stt = 0.0;
  double stg = 0.0;
  double sgg = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double tau = times[k] - times.front();
    stt += tau * tau;
    stg += tau * fit.integral[k];
    sgg += fit.integral[k] * fit.integral[k];
  }
  if (!(stt > 0.0)) throw DataError("integrated_error_fit: degenerate time values");
  fit.slope = stg / stt;
  if (sgg > 0.0) {
    double ss_res = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double r = fit.integral[k] - fit.slope * (times[k] - times.front());
      ss_res += r * r;
    }
    fit.r2 = 1.0 - ss_res / sgg;
  } else {
    fit.r2 = 1.0;  // g identically zero is fitted exactly by slope 0
  }
  return fit;
}

namespace {

Trajectory truth_window(const Trajectory& truth, double t_begin, double t_end) {
  std::vector<Observation> obs;
  if (auto p = truth.position_at(t_begin)) obs.push_back({t_begin, *p});
  for (const auto& o : truth) {
    if (o.t > t_begin && o.t < t_end) obs.push_back(o);
  }
  if (t_end > t_begin) {
    if (auto p = truth.position_at(t_end)) obs.push_back({t_end, *p});
  }
  return Trajectory(std::move(obs));
}

}  // namespace

EvalReport evaluate_forecast(const Trajectory& truth, std::span<const ForecastStep> forecast, const Metric& metric,
                             std::size_t max_lag) {
  EvalReport report;
  const auto errors = ape(truth, forecast, metric);
  const auto in_hdr = truth_in_hdr(truth, forecast);
  report.pct_hdr = pct_hdr(truth, forecast);

  Trajectory window;
  if (!forecast.empty()) window = truth_window(truth, forecast.front().time, forecast.back().time);

  std::vector<double> times;
  std::vector<double> values;
  double nearest_sum = 0.0;
  std::size_t nearest_count = 0;
  for (std::size_t k = 0; k < forecast.size(); ++k) {
    EvalStep row{forecast[k].step, forecast[k].time, errors[k], in_hdr[k], std::nullopt};
    if (forecast[k].present() && !window.empty()) {
      row.nearest_distance = nearest_point_distance(window, forecast[k].estimate->prediction, metric);
      nearest_sum += *row.nearest_distance;
      ++nearest_count;
    }
    if (row.ape) {
      times.push_back(row.time);
      values.push_back(*row.ape);
    }
    report.steps.push_back(row);
  }
  report.evaluated_steps = values.size();
  if (nearest_count > 0) report.mean_nearest_distance = nearest_sum / static_cast<double>(nearest_count);
  if (!values.empty()) {
    double sum = 0.0;
    for (double v : values) sum += v;
    report.mean_ape = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - report.mean_ape) * (v - report.mean_ape);
      report.std_ape = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
  }
  const std::size_t lags = std::min(max_lag, values.size() > 0 ? values.size() - 1 : 0);
  if (lags >= 1) {
    try {
      report.acf = error_acf(values, lags);
    } catch (const DataError& e) {
      spdlog::warn("eval: {}", e.what());
    }
  }
  if (values.size() >= 3) report.fit = integrated_error_fit(times, values);
  return report;
}

}  // namespace kdetrack
