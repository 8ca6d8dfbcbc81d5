#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kdetrack/point.hpp"

namespace kdetrack {

// Axis-aligned box split into a regular lattice of cells. Linear cell index is
// i_0 + n_0 * (i_1 + n_1 * (i_2 + ...)), so axis 0 varies fastest.
class Grid {
 public:
  Grid() = default;
  Grid(Point lo, Point hi, std::vector<std::size_t> cells);

  // Box around `points` padded by `margin_fraction` of each extent (plus a
  // minimum absolute pad) with `longest_axis_cells` cells on the longest axis
  // and square-ish cells elsewhere.
  static Grid covering(std::span<const Point> points, std::size_t longest_axis_cells, double margin_fraction = 0.05);

  [[nodiscard]] std::size_t dim() const noexcept { return cells_.size(); }
  [[nodiscard]] std::size_t cell_count() const noexcept { return total_; }
  [[nodiscard]] std::span<const std::size_t> cells() const noexcept { return cells_; }
  [[nodiscard]] const Point& lo() const noexcept { return lo_; }
  [[nodiscard]] const Point& hi() const noexcept { return hi_; }
  [[nodiscard]] double width(std::size_t axis) const { return width_[axis]; }
  // Length of a cell diagonal.
  [[nodiscard]] double diagonal() const noexcept;
  [[nodiscard]] double max_width() const noexcept;

  [[nodiscard]] std::vector<std::size_t> multi_index(std::size_t linear) const;
  [[nodiscard]] std::size_t linear_index(std::span<const std::size_t> multi) const;
  [[nodiscard]] Point center(std::size_t linear) const;

  // Cell containing x; points on the upper box face belong to the last cell.
  [[nodiscard]] std::optional<std::size_t> locate(std::span<const double> x) const;
  [[nodiscard]] std::optional<std::size_t> locate(const Point& x) const { return locate(x.coords()); }
  [[nodiscard]] bool contains(std::span<const double> x) const { return locate(x).has_value(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Point lo_;
  Point hi_;
  std::vector<std::size_t> cells_;
  std::vector<double> width_;
  std::size_t total_ = 0;
};

}  // namespace kdetrack
