#include "kdetrack/hdr.hpp"

#include <algorithm>
#include <cmath>

#include "kdetrack/errors.hpp"

namespace kdetrack {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("HDR alpha must lie in (0, 1)");
}

std::vector<double> sampled_densities(const DensityEstimate& f, std::size_t m, Rng& rng) {
  if (m < kMinHdrSamples) {
    throw ConfigError("HDR needs at least " + std::to_string(kMinHdrSamples) + " Monte Carlo samples");
  }
  std::vector<double> values;
  values.reserve(m);
  for (const auto& p : f.draw(m, rng)) values.push_back(f.evaluate(p));
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace

HdrRegion::HdrRegion(std::shared_ptr<const DensityEstimate> source, double alpha, double threshold,
                     std::size_t mc_samples)
    : source_(std::move(source)), alpha_(alpha), threshold_(threshold), mc_samples_(mc_samples) {
  if (!source_) throw DataError("HDR region needs a density estimate");
  check_alpha(alpha_);
  if (!(threshold_ >= 0.0)) throw DataError("HDR threshold must be non-negative");
}

bool HdrRegion::contains(std::span<const double> x) const { return source_->evaluate(x) >= threshold_; }

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

HdrRegion estimate_hdr(std::shared_ptr<const DensityEstimate> f, double alpha, std::size_t m, Rng& rng) {
  check_alpha(alpha);
  if (!f) throw DataError("HDR needs a density estimate");
  const auto values = sampled_densities(*f, m, rng);
  const double c = quantile_type7(values, alpha);
  return HdrRegion(std::move(f), alpha, c, m);
}

std::vector<HdrRegion> estimate_hdr_levels(std::shared_ptr<const DensityEstimate> f, std::span<const double> alphas,
                                           std::size_t m, Rng& rng) {
  for (double a : alphas) check_alpha(a);
  if (!f) throw DataError("HDR needs a density estimate");
  const auto values = sampled_densities(*f, m, rng);
  std::vector<HdrRegion> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.emplace_back(f, a, quantile_type7(values, a), m);
  return out;
}

std::vector<std::size_t> grid_extract(const HdrRegion& region, const Grid& grid) {
  require_dimension(region.source().dim(), grid.dim(), "grid_extract");
  for (std::size_t n : grid.cells()) {
    if (n < 2) throw ConfigError("grid_extract: resolution must be >= 2 cells per axis");
  }
  std::vector<std::size_t> inside;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (region.contains(grid.center(c))) inside.push_back(c);
  }
  return inside;
}

}  // namespace kdetrack
