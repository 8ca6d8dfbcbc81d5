#include "kdetrack/kernel.hpp"

#include <cmath>
#include <numbers>

#include "kdetrack/errors.hpp"

namespace kdetrack {

double Kernel1D::eval(double u) const noexcept {
  switch (family_) {
    case KernelFamily::epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelFamily::gaussian:
      return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  }
  return 0.0;
}

double Kernel1D::sample(Rng& rng) const {
  switch (family_) {
    case KernelFamily::epanechnikov: {
      // Three-uniform selection: returns an exact Epanechnikov variate without rejection.
      std::uniform_real_distribution<double> uniform(-1.0, 1.0);
      const double u1 = uniform(rng);
      const double u2 = uniform(rng);
      const double u3 = uniform(rng);
      if (std::abs(u3) >= std::abs(u2) && std::abs(u3) >= std::abs(u1)) return u2;
      return u3;
    }
    case KernelFamily::gaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(rng);
    }
  }
  return 0.0;
}

std::optional<Interval> Kernel1D::support() const noexcept {
  if (family_ == KernelFamily::epanechnikov) return Interval{-1.0, 1.0};
  return std::nullopt;
}

std::string to_string(KernelFamily family) {
  return family == KernelFamily::gaussian ? "gaussian" : "epanechnikov";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "epanechnikov") return KernelFamily::epanechnikov;
  if (name == "gaussian") return KernelFamily::gaussian;
  throw ConfigError("unknown kernel '" + std::string(name) + "' (expected epanechnikov or gaussian)");
}

BandwidthVector::BandwidthVector(std::vector<double> h) : h_(std::move(h)) {
  if (h_.empty()) throw ConfigError("bandwidth vector must have at least one entry");
  for (double v : h_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("bandwidth entries must be positive and finite");
  }
}

double BandwidthVector::norm() const noexcept {
  double s = 0.0;
  for (double v : h_) s += v * v;
  return std::sqrt(s);
}

double BandwidthVector::product() const noexcept {
  double p = 1.0;
  for (double v : h_) p *= v;
  return p;
}

}  // namespace kdetrack
