#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "kdetrack/kernel.hpp"
#include "kdetrack/point.hpp"
#include "kdetrack/random.hpp"

namespace kdetrack {

// Accepts or rejects a location during constrained mode search.
using FeasibilityPredicate = std::function<bool(std::span<const double>)>;

// Product-kernel density estimate
//   f(x) = 1 / (N prod_j h_j) * sum_i prod_j K((x_j - c_ij) / h_j).
// Immutable after build; evaluate and mode are safe to call concurrently.
class DensityEstimate {
 public:
  static DensityEstimate build(std::span<const Point> points, BandwidthVector h, Kernel1D kernel);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] const BandwidthVector& bandwidth() const noexcept { return h_; }
  [[nodiscard]] const Kernel1D& kernel() const noexcept { return kernel_; }

  [[nodiscard]] std::span<const double> center(std::size_t i) const {
    return {centers_.data() + i * dim_, dim_};
  }
  [[nodiscard]] std::vector<Point> centers() const;

  [[nodiscard]] double evaluate(std::span<const double> x) const;
  [[nodiscard]] double evaluate(const Point& x) const { return evaluate(x.coords()); }

  // Each draw picks a center uniformly and adds h_j-scaled kernel noise per coordinate.
  [[nodiscard]] std::vector<Point> draw(std::size_t m, Rng& rng) const;

  // Axis-aligned box containing every kernel support; for unbounded kernels the
  // box spans +-6 bandwidths around the centers.
  [[nodiscard]] std::pair<Point, Point> support_box() const;

 private:
  DensityEstimate(std::vector<double> centers, std::size_t dim, BandwidthVector h, Kernel1D kernel);

  std::vector<double> centers_;
  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  BandwidthVector h_;
  Kernel1D kernel_;
  std::vector<double> inv_h_;
  double scale_ = 0.0;  // 1 / (N prod h)
};

struct ModeOptions {
  // Number of best-scoring seeds refined by hill climbing.
  std::size_t refine_seeds = 8;
  double initial_step = 0.5;  // fraction of h_j
  double final_step = 1e-4;   // stop once the step drops below this fraction of h_j
};

// Highest-density point found by scoring the centers plus any candidates, then
// refining the best seeds with coordinate-wise hill climbing at shrinking steps.
// Ties break toward the lexicographically smallest point. When `feasible` is
// set, seeds and iterates it rejects are skipped; throws NoSupportError if no
// seed survives.
Point mode(const DensityEstimate& f, std::span<const Point> candidates = {},
           const FeasibilityPredicate& feasible = {}, const ModeOptions& options = {});

// Scott's rule h_j = sigma_j * N^(-1/(d+4)). Throws NoSupportError when a
// coordinate has zero spread or fewer than two points are given.
BandwidthVector scott_bandwidth(std::span<const Point> points);

}  // namespace kdetrack
