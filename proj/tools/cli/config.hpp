#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdetrack/forecast.hpp"
#include "kdetrack/synthgen.hpp"

namespace kdetrack::cli {

// Every setting the command line understands. A config file and --flags both
// address fields by the same key; see `known_keys()`.
struct RunConfig {
  // paths
  std::filesystem::path input;
  std::filesystem::path mask;
  std::filesystem::path output_dir = ".";
  std::filesystem::path truth;
  std::filesystem::path forecast;
  std::filesystem::path support;  // defaults to support.txt beside `forecast`

  // forecast
  double epsilon = 1.0;
  double theta = 1.0;
  double dt = 1.0;
  double horizon = 1.0;
  double alpha = 0.3;
  std::vector<double> bandwidth;  // empty: Scott's rule; one value: broadcast
  std::string kernel = "epanechnikov";
  std::string lagrangian = "gaussian_wells";
  double sigma = 1.0;
  double pheromone_rate = 0.0;
  std::string metric = "euclidean";
  double radius = kEarthRadiusNm;
  bool constrain_prediction = true;
  std::uint64_t seed = 0;
  std::size_t hdr_samples = kDefaultHdrSamples;
  std::size_t grid_cells = 200;
  unsigned threads = 0;
  std::size_t history_length = 0;  // 0 keeps the whole input
  bool export_grids = false;
  std::size_t grid_resolution = 100;

  // synth
  std::string generator = "loiter";  // loiter, loiter5, lorenz
  std::optional<std::size_t> steps;
  std::optional<double> noise_sigma;
  std::optional<double> step_dt;
  std::optional<double> speed;
  double lorenz_sigma = 10.0;
  double lorenz_rho = 28.0;
  double lorenz_beta = 8.0 / 3.0;

  // density
  std::size_t step = 1;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  std::size_t resolution = 100;
  std::vector<double> alphas;  // non-empty: sweep with one shared sample

  // eval
  std::size_t max_lag = 20;

  // The key = value pairs that were set explicitly, in key order.
  std::map<std::string, std::string> explicit_values;

  void set(const std::string& key, const std::string& value);

  // Library config for the forecast stage, validated. `dim` broadcasts a
  // single bandwidth value.
  [[nodiscard]] ForecastConfig forecast_config(std::size_t dim) const;
  [[nodiscard]] Metric metric_value() const;
  [[nodiscard]] LoiterSpec loiter_spec() const;
  [[nodiscard]] LorenzSpec lorenz_spec() const;

  // Every field, resolved, for metadata sidecars.
  [[nodiscard]] std::map<std::string, std::string> resolved() const;
};

const std::vector<std::string>& known_keys();

// Flat "key = value" text. '#' starts a comment line. Unknown or repeated keys
// throw ConfigError naming the line.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in, const std::string& source);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

}  // namespace kdetrack::cli
