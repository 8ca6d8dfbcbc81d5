#include "kdetrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kdetrack/errors.hpp"

namespace kdetrack {

Metric Metric::haversine(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("haversine radius must be positive and finite");
  }
  return Metric(MetricKind::haversine, radius);
}

std::string to_string(MetricKind kind) {
  return kind == MetricKind::haversine ? "haversine" : "euclidean";
}

MetricKind parse_metric_kind(const std::string& name) {
  if (name == "euclidean") return MetricKind::euclidean;
  if (name == "haversine") return MetricKind::haversine;
  throw ConfigError("unknown metric '" + name + "' (expected euclidean or haversine)");
}

namespace {

double haversine_distance(std::span<const double> a, std::span<const double> b, double radius) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double lat1 = a[0] * deg;
  const double lat2 = b[0] * deg;
  const double dlat = (b[0] - a[0]) * deg;
  const double dlon = (b[1] - a[1]) * deg;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * radius * std::asin(std::sqrt(h));
}

}  // namespace

double distance(std::span<const double> a, std::span<const double> b, const Metric& m) {
  require_dimension(a.size(), b.size(), "distance");
  if (m.kind() == MetricKind::haversine) {
    if (a.size() != 2) throw DimensionError("haversine distance requires 2-d (lat, lon) points");
    return haversine_distance(a, b, m.radius());
  }
  return euclidean(a, b);
}

double angle_distance(const Velocity& u, const Velocity& v) {
  require_dimension(u.components.dim(), v.components.dim(), "angle_distance");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw ZeroVelocityError("angle_distance: zero-magnitude velocity");
  double dot = 0.0;
  for (std::size_t i = 0; i < u.components.dim(); ++i) dot += u.components[i] * v.components[i];
  return std::clamp(1.0 - dot / (nu * nv), 0.0, 2.0);
}

Velocity finite_difference_velocity(const Trajectory& traj, std::size_t index) {
  if (index == 0) throw DataError("finite_difference_velocity: index 0 has no predecessor");
  if (index >= traj.size()) throw DataError("finite_difference_velocity: index out of range");
  const auto& cur = traj[index];
  const auto& prev = traj[index - 1];
  const double dt = cur.t - prev.t;
  if (!(dt > 0.0)) {
    throw DataError("finite_difference_velocity: non-increasing timestamps at index " + std::to_string(index));
  }
  Point v = cur.x - prev.x;
  for (double& c : v) c /= dt;
  return Velocity{std::move(v)};
}

}  // namespace kdetrack
