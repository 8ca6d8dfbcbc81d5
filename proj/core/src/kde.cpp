#include "kdetrack/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kdetrack/errors.hpp"

namespace kdetrack {

DensityEstimate::DensityEstimate(std::vector<double> centers, std::size_t dim, BandwidthVector h, Kernel1D kernel)
    : centers_(std::move(centers)),
      dim_(dim),
      count_(centers_.size() / dim),
      h_(std::move(h)),
      kernel_(kernel),
      inv_h_(dim) {
  for (std::size_t j = 0; j < dim_; ++j) inv_h_[j] = 1.0 / h_[j];
  scale_ = 1.0 / (static_cast<double>(count_) * h_.product());
}

DensityEstimate DensityEstimate::build(std::span<const Point> points, BandwidthVector h, Kernel1D kernel) {
  if (points.empty()) throw DataError("density estimate: empty point set");
  if (h.dim() == 0) throw ConfigError("density estimate: empty bandwidth vector");
  const std::size_t d = h.dim();
  std::vector<double> flat;
  flat.reserve(points.size() * d);
  for (const auto& p : points) {
    require_dimension(d, p.dim(), "density estimate");
    if (!p.is_finite()) throw DataError("density estimate: non-finite center");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return DensityEstimate(std::move(flat), d, std::move(h), kernel);
}

std::vector<Point> DensityEstimate::centers() const {
  std::vector<Point> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.emplace_back(center(i));
  return out;
}

double DensityEstimate::evaluate(std::span<const double> x) const {
  require_dimension(dim_, x.size(), "density evaluate");
  double sum = 0.0;
  const double* c = centers_.data();
  if (kernel_.family() == KernelFamily::epanechnikov) {
    for (std::size_t i = 0; i < count_; ++i, c += dim_) {
      double prod = 1.0;
      for (std::size_t j = 0; j < dim_; ++j) {
        const double u = (x[j] - c[j]) * inv_h_[j];
        if (u > 1.0 || u < -1.0) {
          prod = 0.0;
          break;
        }
        prod *= 0.75 * (1.0 - u * u);
      }
      sum += prod;
    }
  } else {
    for (std::size_t i = 0; i < count_; ++i, c += dim_) {
      double prod = 1.0;
      for (std::size_t j = 0; j < dim_; ++j) prod *= kernel_.eval((x[j] - c[j]) * inv_h_[j]);
      sum += prod;
    }
  }
  return sum * scale_;
}

std::vector<Point> DensityEstimate::draw(std::size_t m, Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, count_ - 1);
  std::vector<Point> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto c = center(pick(rng));
    Point p(dim_);
    for (std::size_t j = 0; j < dim_; ++j) p[j] = c[j] + h_[j] * kernel_.sample(rng);
    out.push_back(std::move(p));
  }
  return out;
}

std::pair<Point, Point> DensityEstimate::support_box() const {
  const double reach = kernel_.support() ? kernel_.support()->hi : 6.0;
  Point lo(dim_, std::numeric_limits<double>::infinity());
  Point hi(dim_, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < count_; ++i) {
    const auto c = center(i);
    for (std::size_t j = 0; j < dim_; ++j) {
      lo[j] = std::min(lo[j], c[j] - reach * h_[j]);
      hi[j] = std::max(hi[j], c[j] + reach * h_[j]);
    }
  }
  return {lo, hi};
}

namespace {

struct Scored {
  Point x;
  double density;
};

bool better(const Scored& a, const Scored& b) {
  if (a.density != b.density) return a.density > b.density;
  return a.x < b.x;
}

Scored hill_climb(const DensityEstimate& f, Scored start, const FeasibilityPredicate& feasible,
                  const ModeOptions& options) {
  const std::size_t d = f.dim();
  const auto& h = f.bandwidth();
  constexpr std::size_t kMaxMovesPerLevel = 100000;
  Point probe = start.x;
  for (double step = options.initial_step; step >= options.final_step; step *= 0.5) {
    std::size_t moves = 0;
    bool improved = true;
    while (improved && moves < kMaxMovesPerLevel) {
      improved = false;
      for (std::size_t j = 0; j < d; ++j) {
        for (double sign : {1.0, -1.0}) {
          probe = start.x;
          probe[j] += sign * step * h[j];
          if (feasible && !feasible(probe.coords())) continue;
          const double value = f.evaluate(probe);
          if (value > start.density) {
            start.x = probe;
            start.density = value;
            improved = true;
            ++moves;
            break;
          }
        }
      }
    }
  }
  return start;
}

}  // namespace

Point mode(const DensityEstimate& f, std::span<const Point> candidates, const FeasibilityPredicate& feasible,
           const ModeOptions& options) {
  std::vector<Scored> seeds;
  seeds.reserve(f.size() + candidates.size());
  auto consider = [&](Point p) {
    if (feasible && !feasible(p.coords())) return;
    const double value = f.evaluate(p);
    seeds.push_back({std::move(p), value});
  };
  for (std::size_t i = 0; i < f.size(); ++i) consider(Point(f.center(i)));
  for (const auto& c : candidates) {
    require_dimension(f.dim(), c.dim(), "mode candidate");
    consider(c);
  }
  if (seeds.empty()) throw NoSupportError("mode: no feasible seed point");

  std::sort(seeds.begin(), seeds.end(), better);
  seeds.erase(std::unique(seeds.begin(), seeds.end(), [](const Scored& a, const Scored& b) { return a.x == b.x; }),
              seeds.end());

  const std::size_t refine = std::max<std::size_t>(1, std::min(options.refine_seeds, seeds.size()));
  Scored best = hill_climb(f, seeds.front(), feasible, options);
  for (std::size_t k = 1; k < refine; ++k) {
    Scored local = hill_climb(f, seeds[k], feasible, options);
    if (better(local, best)) best = std::move(local);
  }
  return best.x;
}

BandwidthVector scott_bandwidth(std::span<const Point> points) {
  if (points.size() < 2) throw NoSupportError("Scott's rule needs at least two points");
  const std::size_t d = points.front().dim();
  const double n = static_cast<double>(points.size());
  const double factor = std::pow(n, -1.0 / (static_cast<double>(d) + 4.0));
  std::vector<double> h(d);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (const auto& p : points) {
      require_dimension(d, p.dim(), "scott_bandwidth");
      mean += p[j];
    }
    mean /= n;
    double ss = 0.0;
    for (const auto& p : points) ss += (p[j] - mean) * (p[j] - mean);
    const double sigma = std::sqrt(ss / (n - 1.0));
    if (!(sigma > 0.0)) throw NoSupportError("Scott's rule: zero spread in coordinate " + std::to_string(j));
    h[j] = sigma * factor;
  }
  return BandwidthVector(std::move(h));
}

}  // namespace kdetrack
