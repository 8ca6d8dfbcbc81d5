#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kdetrack/geometry.hpp"
#include "kdetrack/grid.hpp"
#include "kdetrack/kde.hpp"
#include "kdetrack/trajectory.hpp"

namespace kdetrack {

// Gridded feasible region. Points outside the grid box are infeasible.
class FeasibilityMask {
 public:
  FeasibilityMask(Grid grid, std::vector<std::uint8_t> feasible);

  static FeasibilityMask all_feasible(Grid grid);
  // Marks a cell feasible when `is_feasible(center)` holds.
  static FeasibilityMask from_predicate(Grid grid, const std::function<bool(const Point&)>& is_feasible);

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] bool feasible(std::size_t cell) const { return feasible_[cell] != 0; }
  [[nodiscard]] bool feasible_at(std::span<const double> x) const;
  [[nodiscard]] bool feasible_at(const Point& x) const { return feasible_at(x.coords()); }
  [[nodiscard]] std::size_t feasible_count() const noexcept;
  [[nodiscard]] std::span<const std::uint8_t> cells() const noexcept { return feasible_; }
  [[nodiscard]] FeasibilityPredicate predicate() const;

 private:
  Grid grid_;
  std::vector<std::uint8_t> feasible_;
};

enum class LagrangianKind { gaussian_wells, least_squares };

std::string to_string(LagrangianKind kind);
LagrangianKind parse_lagrangian_kind(const std::string& name);

// Smallest sigma for which every Gaussian well term 1 - N(d; sigma) is non-negative.
inline constexpr double kMinGaussianWellSigma = 0.3989422804014327;

// Estimated Lagrangian at x:
//   gaussian_wells: sum_i (1 - exp(-d_i^2 / (2 sigma_i^2)) / sqrt(2 pi sigma_i^2))
//   least_squares:  sum_i d_i^2 / sigma_i
// with d_i = d(x, x_i). `sigmas` holds one entry per observation or a single shared value.
double lagrangian_at(LagrangianKind kind, std::span<const Observation> history, std::span<const double> sigmas,
                     std::span<const double> x, const Metric& metric = Metric::euclidean());

// sigma_i = base * (1 + rate * (t_latest - t_i)): older observations get wider wells.
std::vector<double> pheromone_sigmas(std::span<const Observation> history, double base_sigma, double rate);

// Lagrangian sampled at every cell center of a grid.
class EnergyField {
 public:
  static EnergyField build(std::span<const Observation> history, LagrangianKind kind, std::span<const double> sigmas,
                           Grid grid, const Metric& metric = Metric::euclidean());

  [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
  [[nodiscard]] LagrangianKind kind() const noexcept { return kind_; }
  [[nodiscard]] double value(std::size_t cell) const { return values_[cell]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<const Observation> history() const noexcept { return history_; }

 private:
  EnergyField(Grid grid, LagrangianKind kind, std::vector<Observation> history, std::vector<double> values)
      : grid_(std::move(grid)), kind_(kind), history_(std::move(history)), values_(std::move(values)) {}

  Grid grid_;
  LagrangianKind kind_;
  std::vector<Observation> history_;
  std::vector<double> values_;
};

struct EnergyPath {
  // a, the visited cell centers, then b. Same-cell endpoints give just {a, b}.
  std::vector<Point> polyline;
  std::vector<std::size_t> cells;
  // Midpoint-rule line integral over the cell graph.
  double cost = 0.0;
};

// Minimum line integral of the field from a to b over the feasible cell graph
// (3^d - 1 neighbours; diagonal moves must not clip an infeasible cell). Edge
// weight is the mean of the two cell values times the edge length.
// `mask` may be null for an unconstrained domain; otherwise it must share the field's grid.
EnergyPath min_energy_path(const EnergyField& field, const FeasibilityMask* mask, const Point& a, const Point& b);

// Cost of an explicit cell sequence under the same discretisation; throws if
// consecutive cells are not graph neighbours.
double cell_path_cost(const EnergyField& field, std::span<const std::size_t> cells);

// Uniformly time-spaced path: points[k] sits at t0 + k * dt.
struct DensePath {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Point> points;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
};

// True when some consecutive pair is further apart in time than dt.
bool needs_pathfinding(std::span<const Observation> subtraj, double dt);

// Resamples a sparse, time-sorted sub-trajectory onto the lattice t0 + k dt,
// k = 0..floor((t_end - t0) / dt). Gaps wider than dt follow the minimum-energy
// polyline at constant speed; shorter gaps are interpolated linearly. `field`
// may be null when no gap needs pathfinding.
DensePath densify(std::span<const Observation> subtraj, const EnergyField* field, const FeasibilityMask* mask,
                  double dt);

// Time-indexed least-squares reconstruction from repeated noisy passes of one
// path: at each lattice time the grid cell minimising sum_i d(x, x_i(t))^2 / sigma_i
// over the copies' interpolated positions.
DensePath pointwise_least_squares_path(std::span<const Trajectory> copies, std::span<const double> sigmas,
                                       const Grid& grid, const FeasibilityMask* mask, double t0, double dt,
                                       std::size_t count, const Metric& metric = Metric::euclidean());

}  // namespace kdetrack
