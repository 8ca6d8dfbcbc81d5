#include "kdetrack/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kdetrack/errors.hpp"

namespace kdetrack {

Trajectory::Trajectory(std::vector<Observation> observations) : obs_(std::move(observations)) {
  if (obs_.empty()) return;
  dim_ = obs_.front().x.dim();
  if (dim_ == 0) throw DataError("trajectory: points must have dimension >= 1");
  for (std::size_t i = 0; i < obs_.size(); ++i) {
    const auto& o = obs_[i];
    if (o.x.dim() != dim_) {
      throw DimensionError("trajectory: row " + std::to_string(i) + " has dimension " +
                           std::to_string(o.x.dim()) + ", expected " + std::to_string(dim_));
    }
    if (!std::isfinite(o.t) || !o.x.is_finite()) {
      throw DataError("trajectory: non-finite value in row " + std::to_string(i));
    }
  }
}

std::vector<Point> Trajectory::positions() const {
  std::vector<Point> out;
  out.reserve(obs_.size());
  for (const auto& o : obs_) out.push_back(o.x);
  return out;
}

bool Trajectory::strictly_increasing() const noexcept {
  for (std::size_t i = 1; i < obs_.size(); ++i) {
    if (!(obs_[i].t > obs_[i - 1].t)) return false;
  }
  return true;
}

void Trajectory::require_strictly_increasing() const {
  for (std::size_t i = 1; i < obs_.size(); ++i) {
    if (!(obs_[i].t > obs_[i - 1].t)) {
      throw DataError("trajectory: timestamps not strictly increasing at row " + std::to_string(i));
    }
  }
}

Trajectory Trajectory::slice(std::size_t first, std::size_t last) const {
  last = std::min(last, obs_.size());
  first = std::min(first, last);
  return Trajectory(std::vector<Observation>(obs_.begin() + static_cast<std::ptrdiff_t>(first),
                                             obs_.begin() + static_cast<std::ptrdiff_t>(last)));
}

std::optional<Point> Trajectory::position_at(double t) const {
  if (obs_.empty() || t < obs_.front().t || t > obs_.back().t) return std::nullopt;
  auto it = std::lower_bound(obs_.begin(), obs_.end(), t,
                             [](const Observation& o, double value) { return o.t < value; });
  if (it->t == t) return it->x;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (t - lo.t) / (hi.t - lo.t);
  Point p = lo.x;
  for (std::size_t j = 0; j < dim_; ++j) p[j] += w * (hi.x[j] - lo.x[j]);
  return p;
}

}  // namespace kdetrack
