#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "kdetrack/energy.hpp"
#include "kdetrack/geometry.hpp"
#include "kdetrack/hdr.hpp"
#include "kdetrack/kde.hpp"
#include "kdetrack/kernel.hpp"
#include "kdetrack/trajectory.hpp"

namespace kdetrack {

struct LagrangianConfig {
  LagrangianKind kind = LagrangianKind::gaussian_wells;
  double sigma = 1.0;
  // Zero keeps sigma constant; positive values widen older wells (pheromone mode).
  double pheromone_rate = 0.0;
};

struct ForecastConfig {
  double epsilon = 1.0;  // distance tolerance for analogue matching
  double theta = 1.0;    // heading tolerance on the cosine distance, in [0, 2]
  double dt = 1.0;
  double horizon = 1.0;  // T
  double alpha = 0.3;
  // Unset means Scott's rule per step (with a warning).
  std::optional<BandwidthVector> bandwidth;
  Kernel1D kernel{KernelFamily::epanechnikov};
  LagrangianConfig lagrangian;
  Metric metric = Metric::euclidean();
  std::shared_ptr<const FeasibilityMask> mask;
  // With a mask, restrict the point estimate to feasible cells.
  bool constrain_prediction = true;
  std::uint64_t seed = 0;
  std::size_t hdr_samples = kDefaultHdrSamples;
  // Energy-field resolution on the longest axis when no mask supplies a grid.
  std::size_t grid_cells = 200;
  // Worker threads for the per-step stage; 0 picks hardware concurrency.
  unsigned threads = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
  // ceil(T / dt), tolerant to representation error in T / dt.
  [[nodiscard]] std::size_t step_count() const;
};

// Indices into P (0-based) of the matched start points, strictly increasing.
struct MatchSet {
  std::vector<std::size_t> indices;

  [[nodiscard]] bool empty() const noexcept { return indices.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
};

struct StepEstimate {
  Point prediction;
  std::shared_ptr<const DensityEstimate> density;
  HdrRegion region;
};

struct ForecastStep {
  std::size_t step = 0;  // 1..q
  double time = 0.0;     // t_N + step * dt
  std::size_t support_count = 0;
  std::optional<StepEstimate> estimate;  // empty when no densified path reaches this step

  [[nodiscard]] bool present() const noexcept { return estimate.has_value(); }
};

struct Forecast {
  MatchSet matches;
  // Matches whose densification failed are dropped; `used_matches` lists the
  // P indices behind each entry of `paths`.
  std::vector<std::size_t> used_matches;
  std::vector<DensePath> paths;
  std::vector<ForecastStep> steps;
};

// Stage 1. i is matched (1 <= i <= N-2, 0-based) when
//   d(x_i, x_N) < eps, d(x_{i-1}, x_N) >= eps, delta(v_i, v_N) < theta, t_N - t_i > T.
// Candidates with zero velocity are skipped with a warning.
MatchSet collect_start_points(const Trajectory& P, const ForecastConfig& cfg);

// Stage 2. Forward time restriction {x_k : k >= i, t_k - t_i <= T} for each match.
std::vector<Trajectory> extract_subtrajectories(const Trajectory& P, const MatchSet& H, double horizon);

// Stage 4 input: the offset-th point of every densified path long enough to have
// one. Throws NoSupportError when nothing reaches the offset.
std::vector<Point> assemble_kde_inputs(std::span<const DensePath> paths, std::size_t offset);

// Mode restricted to feasible cells: seeds are the feasible centers plus every
// feasible cell center with positive density.
Point point_estimate_constrained(const DensityEstimate& density, const FeasibilityMask& mask);

// Energy-field grid for Stage 3: the mask grid when present, else a box over P.
Grid densification_grid(const Trajectory& P, const ForecastConfig& cfg);

// Stages 1-4 end to end. Throws NoAnaloguesError when Stage 1 finds nothing.
Forecast run_forecast(const Trajectory& P, const ForecastConfig& cfg);

}  // namespace kdetrack
