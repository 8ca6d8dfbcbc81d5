#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "kdetrack/grid.hpp"
#include "kdetrack/kde.hpp"
#include "kdetrack/random.hpp"

namespace kdetrack {

inline constexpr std::size_t kDefaultHdrSamples = 10000;
inline constexpr std::size_t kMinHdrSamples = 100;

// The 100(1 - alpha)% highest density region {x : f(x) >= threshold}, kept as
// a predicate so multimodal, disconnected regions need no geometry.
class HdrRegion {
 public:
  HdrRegion(std::shared_ptr<const DensityEstimate> source, double alpha, double threshold, std::size_t mc_samples);

  [[nodiscard]] double threshold() const noexcept { return threshold_; }
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] std::size_t mc_samples() const noexcept { return mc_samples_; }
  [[nodiscard]] const DensityEstimate& source() const noexcept { return *source_; }
  [[nodiscard]] const std::shared_ptr<const DensityEstimate>& source_ptr() const noexcept { return source_; }

  [[nodiscard]] bool contains(std::span<const double> x) const;
  [[nodiscard]] bool contains(const Point& x) const { return contains(x.coords()); }

 private:
  std::shared_ptr<const DensityEstimate> source_;
  double alpha_;
  double threshold_;
  std::size_t mc_samples_;
};

// Type-7 quantile (linear interpolation between order statistics) of sorted data.
double quantile_type7(std::span<const double> sorted, double p);

// Monte Carlo threshold: draw m points from f, evaluate f at each, and take the
// alpha quantile of those densities.
HdrRegion estimate_hdr(std::shared_ptr<const DensityEstimate> f, double alpha, std::size_t m, Rng& rng);

// Several levels from one shared sample, so thresholds are monotone in alpha.
std::vector<HdrRegion> estimate_hdr_levels(std::shared_ptr<const DensityEstimate> f, std::span<const double> alphas,
                                           std::size_t m, Rng& rng);

// Linear indices of the cells whose centers lie in the region.
std::vector<std::size_t> grid_extract(const HdrRegion& region, const Grid& grid);

}  // namespace kdetrack
