#include "kdetrack/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kdetrack/errors.hpp"

namespace kdetrack {

Grid::Grid(Point lo, Point hi, std::vector<std::size_t> cells)
    : lo_(std::move(lo)), hi_(std::move(hi)), cells_(std::move(cells)) {
  if (cells_.empty()) throw ConfigError("grid: dimension must be >= 1");
  require_dimension(cells_.size(), lo_.dim(), "grid lower bound");
  require_dimension(cells_.size(), hi_.dim(), "grid upper bound");
  width_.resize(cells_.size());
  total_ = 1;
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    if (cells_[a] == 0) throw ConfigError("grid: cell count must be >= 1 on every axis");
    if (!(hi_[a] > lo_[a]) || !std::isfinite(lo_[a]) || !std::isfinite(hi_[a])) {
      throw ConfigError("grid: empty or non-finite box on axis " + std::to_string(a));
    }
    width_[a] = (hi_[a] - lo_[a]) / static_cast<double>(cells_[a]);
    if (total_ > std::numeric_limits<std::size_t>::max() / cells_[a]) throw ConfigError("grid: too many cells");
    total_ *= cells_[a];
  }
}

Grid Grid::covering(std::span<const Point> points, std::size_t longest_axis_cells, double margin_fraction) {
  if (points.empty()) throw DataError("grid: cannot cover an empty point set");
  if (longest_axis_cells == 0) throw ConfigError("grid: cell count must be >= 1");
  const std::size_t d = points.front().dim();
  Point lo(d, std::numeric_limits<double>::infinity());
  Point hi(d, -std::numeric_limits<double>::infinity());
  for (const auto& p : points) {
    require_dimension(d, p.dim(), "grid covering");
    for (std::size_t a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  double longest = 0.0;
  for (std::size_t a = 0; a < d; ++a) longest = std::max(longest, hi[a] - lo[a]);
  if (longest == 0.0) longest = 1.0;
  for (std::size_t a = 0; a < d; ++a) {
    const double pad = std::max(margin_fraction * (hi[a] - lo[a]), 1e-3 * longest);
    lo[a] -= pad;
    hi[a] += pad;
  }
  longest = 0.0;
  for (std::size_t a = 0; a < d; ++a) longest = std::max(longest, hi[a] - lo[a]);
  const double cell = longest / static_cast<double>(longest_axis_cells);
  std::vector<std::size_t> cells(d);
  for (std::size_t a = 0; a < d; ++a) {
    cells[a] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi[a] - lo[a]) / cell - 1e-9)));
    // Stretch the box so cells are exactly square.
    const double extra = static_cast<double>(cells[a]) * cell - (hi[a] - lo[a]);
    lo[a] -= extra / 2.0;
    hi[a] += extra / 2.0;
  }
  return Grid(std::move(lo), std::move(hi), std::move(cells));
}

double Grid::diagonal() const noexcept {
  double s = 0.0;
  for (double w : width_) s += w * w;
  return std::sqrt(s);
}

double Grid::max_width() const noexcept { return *std::max_element(width_.begin(), width_.end()); }

std::vector<std::size_t> Grid::multi_index(std::size_t linear) const {
  std::vector<std::size_t> idx(cells_.size());
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    idx[a] = linear % cells_[a];
    linear /= cells_[a];
  }
  return idx;
}

std::size_t Grid::linear_index(std::span<const std::size_t> multi) const {
  std::size_t linear = 0;
  for (std::size_t a = cells_.size(); a-- > 0;) linear = linear * cells_[a] + multi[a];
  return linear;
}

Point Grid::center(std::size_t linear) const {
  Point c(cells_.size());
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    const std::size_t i = linear % cells_[a];
    linear /= cells_[a];
    c[a] = lo_[a] + (static_cast<double>(i) + 0.5) * width_[a];
  }
  return c;
}

std::optional<std::size_t> Grid::locate(std::span<const double> x) const {
  require_dimension(cells_.size(), x.size(), "grid locate");
  std::size_t linear = 0;
  for (std::size_t a = cells_.size(); a-- > 0;) {
    if (!(x[a] >= lo_[a] && x[a] <= hi_[a])) return std::nullopt;
    auto i = static_cast<std::size_t>(std::floor((x[a] - lo_[a]) / width_[a]));
    i = std::min(i, cells_[a] - 1);
    linear = linear * cells_[a] + i;
  }
  return linear;
}

}  // namespace kdetrack
