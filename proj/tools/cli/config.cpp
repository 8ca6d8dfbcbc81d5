#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>

#include "kdetrack/errors.hpp"
#include "kdetrack/io.hpp"

namespace kdetrack::cli {

namespace {

double to_double(const std::string& key, const std::string& v) {
  try {
    return io::parse_double(v, key);
  } catch (const DataError&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (v.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = v.find(',', start);
    std::string tok = v.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    tok.erase(0, tok.find_first_not_of(' '));
    tok.erase(tok.find_last_not_of(' ') + 1);
    out.push_back(to_double(key, tok));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string fmt(double v) { return io::format_double(v); }

std::string fmt(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + fmt(v[k]);
  return out;
}

template <class T>
std::string fmt_opt(const std::optional<T>& v) {
  if (!v) return "default";
  if constexpr (std::is_floating_point_v<T>) {
    return fmt(*v);
  } else {
    return std::to_string(*v);
  }
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define KDT_PATH(name) \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = v; }, [](const RunConfig& c) { return c.name.string(); }}
#define KDT_DOUBLE(name)                                                                     \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_double(#name, v); }, \
        [](const RunConfig& c) { return fmt(c.name); }}
#define KDT_COUNT(name)                                                                                       \
  Field{#name,                                                                                                \
        [](RunConfig& c, const std::string& v) { c.name = static_cast<decltype(c.name)>(to_u64(#name, v)); }, \
        [](const RunConfig& c) { return std::to_string(c.name); }}
#define KDT_STRING(name) \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = v; }, [](const RunConfig& c) { return c.name; }}
#define KDT_BOOL(name)                                                                     \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_bool(#name, v); }, \
        [](const RunConfig& c) { return std::string(c.name ? "true" : "false"); }}
#define KDT_LIST(name)                                                                    \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_list(#name, v); }, \
        [](const RunConfig& c) { return fmt(c.name); }}
#define KDT_OPT_DOUBLE(name)                                                                 \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = to_double(#name, v); }, \
        [](const RunConfig& c) { return fmt_opt(c.name); }}
#define KDT_OPT_COUNT(name)                                                                                       \
  Field{#name, [](RunConfig& c, const std::string& v) { c.name = static_cast<std::size_t>(to_u64(#name, v)); }, \
        [](const RunConfig& c) { return fmt_opt(c.name); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      KDT_PATH(input),         KDT_PATH(mask),          KDT_PATH(output_dir),     KDT_PATH(truth),
      KDT_PATH(forecast),      KDT_PATH(support),       KDT_DOUBLE(epsilon),      KDT_DOUBLE(theta),
      KDT_DOUBLE(dt),          KDT_DOUBLE(horizon),     KDT_DOUBLE(alpha),        KDT_LIST(bandwidth),
      KDT_STRING(kernel),      KDT_STRING(lagrangian),  KDT_DOUBLE(sigma),        KDT_DOUBLE(pheromone_rate),
      KDT_STRING(metric),      KDT_DOUBLE(radius),      KDT_BOOL(constrain_prediction),
      KDT_COUNT(seed),         KDT_COUNT(hdr_samples),  KDT_COUNT(grid_cells),    KDT_COUNT(threads),
      KDT_COUNT(history_length), KDT_BOOL(export_grids), KDT_COUNT(grid_resolution),
      KDT_STRING(generator),   KDT_OPT_COUNT(steps),    KDT_OPT_DOUBLE(noise_sigma), KDT_OPT_DOUBLE(step_dt),
      KDT_OPT_DOUBLE(speed),   KDT_DOUBLE(lorenz_sigma), KDT_DOUBLE(lorenz_rho),  KDT_DOUBLE(lorenz_beta),
      KDT_COUNT(step),         KDT_LIST(box_lo),        KDT_LIST(box_hi),         KDT_COUNT(resolution),
      KDT_LIST(alphas),        KDT_COUNT(max_lag),
  };
  return table;
}

#undef KDT_PATH
#undef KDT_DOUBLE
#undef KDT_COUNT
#undef KDT_STRING
#undef KDT_BOOL
#undef KDT_LIST
#undef KDT_OPT_DOUBLE
#undef KDT_OPT_COUNT

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw ConfigError("unknown config key '" + key + "'");
  f->set(*this, value);
  explicit_values[key] = value;
}

Metric RunConfig::metric_value() const {
  switch (parse_metric_kind(metric)) {
    case MetricKind::haversine:
      return Metric::haversine(radius);
    case MetricKind::euclidean:
      break;
  }
  return Metric::euclidean();
}

ForecastConfig RunConfig::forecast_config(std::size_t dim) const {
  ForecastConfig cfg;
  cfg.epsilon = epsilon;
  cfg.theta = theta;
  cfg.dt = dt;
  cfg.horizon = horizon;
  cfg.alpha = alpha;
  if (!bandwidth.empty()) {
    if (bandwidth.size() == 1) {
      cfg.bandwidth = BandwidthVector(std::vector<double>(dim, bandwidth.front()));
    } else if (bandwidth.size() == dim) {
      cfg.bandwidth = BandwidthVector(bandwidth);
    } else {
      throw ConfigError("bandwidth: expected 1 or " + std::to_string(dim) + " values, got " +
                        std::to_string(bandwidth.size()));
    }
  }
  cfg.kernel = Kernel1D(parse_kernel_family(kernel));
  cfg.lagrangian.kind = parse_lagrangian_kind(lagrangian);
  cfg.lagrangian.sigma = sigma;
  cfg.lagrangian.pheromone_rate = pheromone_rate;
  cfg.metric = metric_value();
  cfg.constrain_prediction = constrain_prediction;
  cfg.seed = seed;
  cfg.hdr_samples = hdr_samples;
  cfg.grid_cells = grid_cells;
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

LoiterSpec RunConfig::loiter_spec() const {
  LoiterSpec spec;
  if (generator == "loiter") {
    spec = LoiterSpec::default_six();
  } else if (generator == "loiter5") {
    spec = LoiterSpec::default_five();
  } else {
    throw ConfigError("generator '" + generator + "' is not a loiter generator");
  }
  if (steps) spec.steps = *steps;
  if (noise_sigma) spec.noise_sigma = *noise_sigma;
  if (step_dt) spec.step_dt = *step_dt;
  if (speed) spec.speed = *speed;
  spec.validate();
  return spec;
}

LorenzSpec RunConfig::lorenz_spec() const {
  if (generator != "lorenz") throw ConfigError("generator '" + generator + "' is not lorenz");
  LorenzSpec spec;
  spec.sigma = lorenz_sigma;
  spec.rho = lorenz_rho;
  spec.beta = lorenz_beta;
  if (steps) spec.steps = *steps;
  if (noise_sigma) spec.noise_sigma = *noise_sigma;
  if (step_dt) spec.dt = *step_dt;
  if (speed) throw ConfigError("speed applies only to loiter generators");
  spec.validate();
  return spec;
}

std::map<std::string, std::string> RunConfig::resolved() const {
  std::map<std::string, std::string> out;
  for (const auto& f : fields()) out[f.key] = f.get(*this);
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto where = source + ":" + std::to_string(line_no);
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (!find_field(key)) throw ConfigError(where + ": unknown config key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + ": key '" + key + "' set twice");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config_text(in, path.string());
}

}  // namespace kdetrack::cli
