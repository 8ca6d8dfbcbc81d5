#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kdetrack/random.hpp"

namespace kdetrack {

enum class KernelFamily { epanechnikov, gaussian };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

// One-dimensional smoothing kernel; a valid PDF on the real line.
class Kernel1D {
 public:
  constexpr Kernel1D() = default;
  constexpr explicit Kernel1D(KernelFamily family) : family_(family) {}

  [[nodiscard]] constexpr KernelFamily family() const noexcept { return family_; }

  // Epanechnikov: 3/4 (1 - u^2) on [-1, 1]; Gaussian: standard normal density.
  [[nodiscard]] double eval(double u) const noexcept;
  double operator()(double u) const noexcept { return eval(u); }

  // Exact draw from the kernel density.
  double sample(Rng& rng) const;

  // nullopt for unbounded support.
  [[nodiscard]] std::optional<Interval> support() const noexcept;

  friend bool operator==(const Kernel1D&, const Kernel1D&) = default;

 private:
  KernelFamily family_ = KernelFamily::epanechnikov;
};

std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

// Per-coordinate smoothing scales h_j > 0. For compact kernels these are also
// the half-widths of each kernel's support box.
class BandwidthVector {
 public:
  BandwidthVector() = default;
  explicit BandwidthVector(std::vector<double> h);

  [[nodiscard]] std::size_t dim() const noexcept { return h_.size(); }
  double operator[](std::size_t j) const { return h_[j]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return h_; }
  [[nodiscard]] double norm() const noexcept;
  [[nodiscard]] double product() const noexcept;

  friend bool operator==(const BandwidthVector&, const BandwidthVector&) = default;

 private:
  std::vector<double> h_;
};

}  // namespace kdetrack
