#pragma once

#include <cstddef>
#include <string>

#include "kdetrack/point.hpp"
#include "kdetrack/trajectory.hpp"

namespace kdetrack {

// Mean earth radius in nautical miles.
inline constexpr double kEarthRadiusNm = 3440.065;

enum class MetricKind { euclidean, haversine };

// Distance on the data manifold. Haversine treats 2-d points as (lat, lon) in degrees.
class Metric {
 public:
  constexpr Metric() = default;

  static constexpr Metric euclidean() { return Metric(MetricKind::euclidean, 1.0); }
  static Metric haversine(double radius = kEarthRadiusNm);

  [[nodiscard]] constexpr MetricKind kind() const noexcept { return kind_; }
  [[nodiscard]] constexpr double radius() const noexcept { return radius_; }

  friend bool operator==(const Metric&, const Metric&) = default;

 private:
  constexpr Metric(MetricKind kind, double radius) : kind_(kind), radius_(radius) {}

  MetricKind kind_ = MetricKind::euclidean;
  double radius_ = 1.0;
};

std::string to_string(MetricKind kind);
MetricKind parse_metric_kind(const std::string& name);

double distance(std::span<const double> a, std::span<const double> b, const Metric& m);
inline double distance(const Point& a, const Point& b, const Metric& m) {
  return distance(a.coords(), b.coords(), m);
}

// Rate of change of position; coordinate units per time unit.
struct Velocity {
  Point components;

  [[nodiscard]] double norm() const noexcept { return components.norm(); }
  [[nodiscard]] bool is_zero() const noexcept { return norm() == 0.0; }
};

// Cosine distance 1 - <u,v>/(|u||v|), clamped to [0, 2]. Throws ZeroVelocityError
// when either argument has zero length.
double angle_distance(const Velocity& u, const Velocity& v);

// Backward difference (x_i - x_{i-1}) / (t_i - t_{i-1}).
Velocity finite_difference_velocity(const Trajectory& traj, std::size_t index);

}  // namespace kdetrack
