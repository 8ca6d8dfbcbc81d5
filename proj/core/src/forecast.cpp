#include "kdetrack/forecast.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "kdetrack/errors.hpp"
#include "kdetrack/random.hpp"

namespace kdetrack {

namespace {

constexpr double kTimeSlack = 1e-9;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
}

std::string tolerances(const ForecastConfig& cfg) {
  std::ostringstream out;
  out << "epsilon=" << cfg.epsilon << ", theta=" << cfg.theta << ", horizon=" << cfg.horizon;
  return out.str();
}

}  // namespace

void ForecastConfig::validate() const {
  require_finite(epsilon, "epsilon");
  require_finite(theta, "theta");
  require_finite(dt, "dt");
  require_finite(horizon, "horizon");
  require_finite(alpha, "alpha");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(theta >= 0.0 && theta <= 2.0)) throw ConfigError("theta must lie in [0, 2]");
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (horizon < dt) throw ConfigError("horizon T must be >= dt");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (hdr_samples < kMinHdrSamples) {
    throw ConfigError("hdr_samples must be >= " + std::to_string(kMinHdrSamples));
  }
  if (grid_cells < 2) throw ConfigError("grid_cells must be >= 2");
  if (!(lagrangian.sigma > 0.0) || !std::isfinite(lagrangian.sigma)) throw ConfigError("sigma must be > 0");
  if (!(lagrangian.pheromone_rate >= 0.0)) throw ConfigError("pheromone_rate must be >= 0");
}

std::size_t ForecastConfig::step_count() const {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(horizon / dt - kTimeSlack)));
}

MatchSet collect_start_points(const Trajectory& P, const ForecastConfig& cfg) {
  if (P.size() < 3) throw DataError("Stage 1: need at least 3 observations");
  P.require_strictly_increasing();
  const std::size_t last = P.size() - 1;
  const auto& now = P[last];
  const Velocity v_now = finite_difference_velocity(P, last);
  MatchSet H;
  if (v_now.is_zero()) {
    spdlog::warn("Stage 1: current velocity is zero; heading comparison undefined, no candidate can match");
    return H;
  }
  for (std::size_t i = 1; i < last; ++i) {
    if (!(now.t - P[i].t > cfg.horizon)) break;
    if (!(distance(P[i].x, now.x, cfg.metric) < cfg.epsilon)) continue;
    if (!(distance(P[i - 1].x, now.x, cfg.metric) >= cfg.epsilon)) continue;
    const Velocity v = finite_difference_velocity(P, i);
    if (v.is_zero()) {
      spdlog::warn("Stage 1: candidate {} has zero velocity; skipped", i);
      continue;
    }
    if (angle_distance(v, v_now) < cfg.theta) H.indices.push_back(i);
  }
  return H;
}

std::vector<Trajectory> extract_subtrajectories(const Trajectory& P, const MatchSet& H, double horizon) {
  std::vector<Trajectory> out;
  out.reserve(H.size());
  for (std::size_t i : H.indices) {
    if (i >= P.size()) throw DataError("extract_subtrajectories: match index out of range");
    std::size_t end = i + 1;
    while (end < P.size() && P[end].t - P[i].t <= horizon * (1.0 + kTimeSlack)) ++end;
    out.push_back(P.slice(i, end));
  }
  return out;
}

std::vector<Point> assemble_kde_inputs(std::span<const DensePath> paths, std::size_t offset) {
  std::vector<Point> support;
  for (const auto& path : paths) {
    if (offset < path.size()) support.push_back(path.points[offset]);
  }
  if (support.empty()) throw NoSupportError("no support at step offset " + std::to_string(offset));
  return support;
}

Point point_estimate_constrained(const DensityEstimate& density, const FeasibilityMask& mask) {
  const Grid& grid = mask.grid();
  require_dimension(density.dim(), grid.dim(), "constrained point estimate");
  const auto [lo, hi] = density.support_box();
  std::vector<Point> candidates;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!mask.feasible(c)) continue;
    Point center = grid.center(c);
    bool inside = true;
    for (std::size_t a = 0; a < center.dim() && inside; ++a) inside = center[a] >= lo[a] && center[a] <= hi[a];
    if (inside && density.evaluate(center) > 0.0) candidates.push_back(std::move(center));
  }
  bool feasible_center = false;
  for (std::size_t i = 0; i < density.size() && !feasible_center; ++i) {
    feasible_center = mask.feasible_at(density.center(i));
  }
  if (candidates.empty() && !feasible_center) {
    throw NoSupportError("constrained estimate: density support lies entirely in the infeasible region");
  }
  return mode(density, candidates, mask.predicate());
}

Grid densification_grid(const Trajectory& P, const ForecastConfig& cfg) {
  if (cfg.mask) return cfg.mask->grid();
  const auto positions = P.positions();
  return Grid::covering(positions, cfg.grid_cells);
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> field_sigmas(const Trajectory& P, const LagrangianConfig& lag) {
  if (lag.pheromone_rate > 0.0) return pheromone_sigmas(P.observations(), lag.sigma, lag.pheromone_rate);
  return {lag.sigma};
}

}  // namespace

Forecast run_forecast(const Trajectory& P, const ForecastConfig& cfg) {
  cfg.validate();
  if (P.empty()) throw DataError("forecast: empty trajectory");
  P.require_strictly_increasing();
  if (cfg.metric.kind() == MetricKind::haversine && P.dim() != 2) {
    throw ConfigError("haversine metric requires 2-d (lat, lon) data");
  }
  if (cfg.bandwidth) require_dimension(P.dim(), cfg.bandwidth->dim(), "forecast bandwidth");
  if (cfg.mask) require_dimension(P.dim(), cfg.mask->grid().dim(), "forecast mask");

  Forecast result;
  result.matches = collect_start_points(P, cfg);
  if (result.matches.empty()) throw NoAnaloguesError("Stage 1: no analogues found (" + tolerances(cfg) + ")");
  spdlog::debug("Stage 1: {} analogues", result.matches.size());

  const auto subtrajectories = extract_subtrajectories(P, result.matches, cfg.horizon);

  std::optional<EnergyField> field;
  for (std::size_t j = 0; j < subtrajectories.size(); ++j) {
    const auto& sub = subtrajectories[j];
    if (!field && needs_pathfinding(sub.observations(), cfg.dt)) {
      const auto sigmas = field_sigmas(P, cfg.lagrangian);
      field.emplace(EnergyField::build(P.observations(), cfg.lagrangian.kind, sigmas, densification_grid(P, cfg),
                                       cfg.metric));
    }
    try {
      result.paths.push_back(densify(sub.observations(), field ? &*field : nullptr, cfg.mask.get(), cfg.dt));
      result.used_matches.push_back(result.matches.indices[j]);
    } catch (const PathError& e) {
      spdlog::warn("Stage 3: dropping analogue {}: {}", result.matches.indices[j], e.what());
    }
  }
  if (result.paths.empty()) throw DataError("Stage 3: no sub-trajectory could be densified");

  if (!cfg.bandwidth) {
    spdlog::warn("Stage 4: no bandwidth given; using Scott's rule, which tends to give high-error tracks");
  }
  std::optional<BandwidthVector> history_bandwidth;
  std::once_flag history_bandwidth_once;
  auto fallback_bandwidth = [&]() -> const BandwidthVector& {
    std::call_once(history_bandwidth_once, [&] { history_bandwidth = scott_bandwidth(P.positions()); });
    return *history_bandwidth;
  };

  const std::size_t q = cfg.step_count();
  result.steps.resize(q);
  const double t_now = P.back().t;
  parallel_for(q, cfg.threads, [&](std::size_t k) {
    ForecastStep& step = result.steps[k];
    step.step = k + 1;
    step.time = t_now + static_cast<double>(step.step) * cfg.dt;
    std::vector<Point> support;
    for (const auto& path : result.paths) {
      if (step.step < path.size()) support.push_back(path.points[step.step]);
    }
    step.support_count = support.size();
    if (support.empty()) return;

    BandwidthVector h;
    if (cfg.bandwidth) {
      h = *cfg.bandwidth;
    } else {
      try {
        h = scott_bandwidth(support);
      } catch (const NoSupportError&) {
        h = fallback_bandwidth();
      }
    }
    auto density = std::make_shared<const DensityEstimate>(DensityEstimate::build(support, h, cfg.kernel));
    Point prediction;
    if (cfg.mask && cfg.constrain_prediction) {
      try {
        prediction = point_estimate_constrained(*density, *cfg.mask);
      } catch (const NoSupportError& e) {
        spdlog::warn("Stage 4: step {}: {}; using the unconstrained mode", step.step, e.what());
        prediction = mode(*density);
      }
    } else {
      prediction = mode(*density);
    }
    Rng rng = make_rng(derive_seed(cfg.seed, step.step));
    HdrRegion region = estimate_hdr(density, cfg.alpha, cfg.hdr_samples, rng);
    step.estimate = StepEstimate{std::move(prediction), std::move(density), std::move(region)};
  });
  return result;
}

}  // namespace kdetrack
