#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kdetrack/energy.hpp"
#include "kdetrack/forecast.hpp"
#include "kdetrack/geometry.hpp"
#include "kdetrack/grid.hpp"
#include "kdetrack/hdr.hpp"
#include "kdetrack/kde.hpp"
#include "kdetrack/kernel.hpp"
#include "kdetrack/trajectory.hpp"

namespace kdetrack::io {

// printf("%.17g"); enough digits that parsing returns the same double.
std::string format_double(double v);
// Whole-token parse; throws DataError mentioning `what` on failure.
double parse_double(std::string_view token, std::string_view what);

// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// --- trajectories ---------------------------------------------------------
//
//   # kdetrack-trajectory v1 dim=2 metric=euclidean columns=t,x1,x2
//   0,1.5,2.25
//
// Geo files use metric=haversine radius=<r> and columns t,lat,lon (degrees).

struct TrajectoryFile {
  Trajectory trajectory;
  Metric metric;
  std::vector<std::string> columns;
};

std::vector<std::string> default_columns(std::size_t dim, const Metric& metric);
std::string format_trajectory(const Trajectory& traj, const Metric& metric, std::span<const std::string> columns = {});
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj, const Metric& metric,
                      std::span<const std::string> columns = {});
// Enforces strictly increasing t, constant dimension and finite values.
TrajectoryFile parse_trajectory(std::istream& in, const std::string& source = "<stream>");
TrajectoryFile read_trajectory(const std::filesystem::path& path);

// --- feasibility masks ----------------------------------------------------
//
//   # kdetrack-mask v1
//   dim 2
//   lo 0 0
//   hi 10 10
//   cells 4 3
//   0111
//   1111
//   1110
//
// One line of 0/1 characters per run of axis 0, lines ordered by linear index.

std::string format_mask(const FeasibilityMask& mask);
void write_mask(const std::filesystem::path& path, const FeasibilityMask& mask);
FeasibilityMask parse_mask(std::istream& in, const std::string& source = "<stream>");
FeasibilityMask read_mask(const std::filesystem::path& path);

// --- forecasts ------------------------------------------------------------
//
//   # kdetrack-forecast v1 dim=2 steps=20 alpha=0.3 kernel=epanechnikov t0=... dt=... samples=10000
//   1 t_1 p_1 ... p_d c_alpha support_count
//   2 t_2 absent

struct ForecastRow {
  std::size_t step = 0;
  double time = 0.0;
  std::optional<Point> prediction;
  double threshold = 0.0;
  std::size_t support_count = 0;
};

struct ForecastFile {
  std::size_t dim = 0;
  double alpha = 0.0;
  KernelFamily kernel = KernelFamily::epanechnikov;
  double t0 = 0.0;
  double dt = 0.0;
  std::size_t hdr_samples = 0;
  std::vector<ForecastRow> rows;
};

std::string format_forecast(std::span<const ForecastStep> steps, std::size_t dim, const ForecastConfig& cfg, double t0);
ForecastFile parse_forecast(std::istream& in, const std::string& source = "<stream>");
ForecastFile read_forecast(const std::filesystem::path& path);

// --- KDE support (what each step's density was built from) ----------------
//
//   # kdetrack-support v1 dim=2 kernel=epanechnikov
//   step 1 t ... n 3
//   h 0.3 0.3
//   x 1 2
//   ...

struct SupportStep {
  std::size_t step = 0;
  double time = 0.0;
  BandwidthVector bandwidth;
  std::vector<Point> centers;
};

struct SupportFile {
  std::size_t dim = 0;
  KernelFamily kernel = KernelFamily::epanechnikov;
  std::vector<SupportStep> steps;

  [[nodiscard]] const SupportStep* find(std::size_t step) const;
  // DensityEstimate for a step; throws DataError if the step is missing.
  [[nodiscard]] DensityEstimate density(std::size_t step) const;
};

std::string format_support(std::span<const ForecastStep> steps, std::size_t dim, KernelFamily kernel);
SupportFile parse_support(std::istream& in, const std::string& source = "<stream>");
SupportFile read_support(const std::filesystem::path& path);

// Steps rebuilt from saved artifacts: prediction plus an HDR region at the
// file's threshold, backed by the saved support. Absent rows stay absent.
std::vector<ForecastStep> rebuild_steps(const ForecastFile& file, const SupportFile& support);

// --- grid exports ---------------------------------------------------------

// Rows "x_1 ... x_d density" at every cell center, linear-index order.
std::string format_density_grid(const DensityEstimate& f, const Grid& grid);
// Rows "x_1 ... x_d in_region" with in_region in {0, 1}.
std::string format_hdr_grid(const HdrRegion& region, const Grid& grid);

// --- run metadata ---------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes);

// Sorted "key = value" lines, then version, config_hash (FNV-1a over the sorted
// parameter lines) and seed.
std::string format_metadata(const std::map<std::string, std::string>& params, std::uint64_t seed);

}  // namespace kdetrack::io
