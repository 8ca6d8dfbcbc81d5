#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kdetrack/point.hpp"

namespace kdetrack {

struct Observation {
  double t = 0.0;
  Point x;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Timestamped positions with a fixed dimension. Finite values are enforced on
// construction; strict time ordering is checked separately because some
// operations report duplicate timestamps as their own error.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<Observation> observations);

  [[nodiscard]] std::size_t size() const noexcept { return obs_.size(); }
  [[nodiscard]] bool empty() const noexcept { return obs_.empty(); }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

  const Observation& operator[](std::size_t i) const { return obs_[i]; }
  const Observation& front() const { return obs_.front(); }
  const Observation& back() const { return obs_.back(); }
  auto begin() const noexcept { return obs_.begin(); }
  auto end() const noexcept { return obs_.end(); }

  [[nodiscard]] std::span<const Observation> observations() const noexcept { return obs_; }
  [[nodiscard]] std::vector<Point> positions() const;

  [[nodiscard]] bool strictly_increasing() const noexcept;
  // Throws DataError naming the first offending row.
  void require_strictly_increasing() const;

  // Rows [first, last).
  [[nodiscard]] Trajectory slice(std::size_t first, std::size_t last) const;

  // Piecewise-linear position at time t; nullopt outside [front().t, back().t].
  [[nodiscard]] std::optional<Point> position_at(double t) const;

 private:
  std::vector<Observation> obs_;
  std::size_t dim_ = 0;
};

}  // namespace kdetrack
