#include "kdetrack/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <system_error>

#include "kdetrack/errors.hpp"

namespace kdetrack::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view token, std::string_view what) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || token.empty()) {
    throw DataError(std::string(what) + ": cannot parse number '" + std::string(token) + "'");
  }
  return v;
}

namespace {

std::size_t parse_count(std::string_view token, std::string_view what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw DataError(std::string(what) + ": cannot parse count '" + std::string(token) + "'");
  }
  return v;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> tokens(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream ss{std::string(line)};
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// key=value fields after the magic word of a "# kdetrack-... v1" header.
std::map<std::string, std::string> header_fields(const std::string& line, std::string_view magic,
                                                 const std::string& source) {
  const auto toks = tokens(line);
  if (toks.size() < 3 || toks[0] != "#" || toks[1] != magic || toks[2] != "v1") {
    throw DataError(source + ": expected header '# " + std::string(magic) + " v1 ...'");
  }
  std::map<std::string, std::string> out;
  for (std::size_t k = 3; k < toks.size(); ++k) {
    const auto eq = toks[k].find('=');
    if (eq == std::string::npos) throw DataError(source + ": malformed header field '" + toks[k] + "'");
    out[toks[k].substr(0, eq)] = toks[k].substr(eq + 1);
  }
  return out;
}

const std::string& require_field(const std::map<std::string, std::string>& fields, const std::string& key,
                                 const std::string& source) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw DataError(source + ": header lacks '" + key + "='");
  return it->second;
}

std::string location(const std::string& source, std::size_t line_no) {
  return source + ":" + std::to_string(line_no);
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- trajectories ---------------------------------------------------------

std::vector<std::string> default_columns(std::size_t dim, const Metric& metric) {
  std::vector<std::string> cols{"t"};
  if (metric.kind() == MetricKind::haversine && dim == 2) {
    cols.emplace_back("lat");
    cols.emplace_back("lon");
    return cols;
  }
  for (std::size_t j = 1; j <= dim; ++j) cols.push_back("x" + std::to_string(j));
  return cols;
}

std::string format_trajectory(const Trajectory& traj, const Metric& metric, std::span<const std::string> columns) {
  if (traj.empty()) throw DataError("refusing to write an empty trajectory");
  const std::size_t d = traj.dim();
  std::vector<std::string> cols(columns.begin(), columns.end());
  if (cols.empty()) cols = default_columns(d, metric);
  if (cols.size() != d + 1) throw DimensionError("trajectory columns: expected " + std::to_string(d + 1));
  std::string out = "# kdetrack-trajectory v1 dim=" + std::to_string(d) + " metric=" + to_string(metric.kind());
  if (metric.kind() == MetricKind::haversine) out += " radius=" + format_double(metric.radius());
  out += " columns=";
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k].find_first_of(", \t\n=") != std::string::npos) {
      throw ConfigError("column name '" + cols[k] + "' contains a separator");
    }
    out += (k ? "," : "") + cols[k];
  }
  out += '\n';
  for (const auto& o : traj) {
    out += format_double(o.t);
    for (double v : o.x) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_trajectory(const fs::path& path, const Trajectory& traj, const Metric& metric,
                      std::span<const std::string> columns) {
  write_file_atomic(path, format_trajectory(traj, metric, columns));
}

TrajectoryFile parse_trajectory(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  const auto fields = header_fields(line, "kdetrack-trajectory", source);
  const std::size_t d = parse_count(require_field(fields, "dim", source), source + " dim");
  if (d == 0) throw DataError(source + ": dim must be >= 1");

  TrajectoryFile file;
  const auto kind = parse_metric_kind(require_field(fields, "metric", source));
  if (kind == MetricKind::haversine) {
    const auto it = fields.find("radius");
    file.metric = it == fields.end() ? Metric::haversine() : Metric::haversine(parse_double(it->second, source));
    if (d != 2) throw DimensionError(source + ": haversine files must have dim=2");
  }
  if (const auto it = fields.find("columns"); it != fields.end()) {
    file.columns = split(it->second, ',');
    if (file.columns.size() != d + 1) {
      throw DimensionError(source + ": header lists " + std::to_string(file.columns.size()) + " columns, dim=" +
                           std::to_string(d) + " needs " + std::to_string(d + 1));
    }
  } else {
    file.columns = default_columns(d, file.metric);
  }

  std::vector<Observation> obs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t, ',');
    if (cells.size() != d + 1) {
      throw DimensionError(location(source, line_no) + ": expected " + std::to_string(d + 1) + " fields, found " +
                           std::to_string(cells.size()));
    }
    Observation o;
    o.t = parse_double(trim(cells[0]), location(source, line_no));
    std::vector<double> x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = parse_double(trim(cells[j + 1]), location(source, line_no));
    o.x = Point(std::move(x));
    if (!std::isfinite(o.t) || !o.x.is_finite()) throw DataError(location(source, line_no) + ": non-finite value");
    if (!obs.empty() && !(o.t > obs.back().t)) {
      throw DataError(location(source, line_no) + ": time " + format_double(o.t) + " does not increase");
    }
    obs.push_back(std::move(o));
  }
  file.trajectory = Trajectory(std::move(obs));
  return file;
}

TrajectoryFile read_trajectory(const fs::path& path) {
  auto in = open_input(path);
  return parse_trajectory(in, path.string());
}

// --- masks ----------------------------------------------------------------

std::string format_mask(const FeasibilityMask& mask) {
  const Grid& g = mask.grid();
  std::string out = "# kdetrack-mask v1\ndim " + std::to_string(g.dim()) + "\nlo";
  for (double v : g.lo()) out += " " + format_double(v);
  out += "\nhi";
  for (double v : g.hi()) out += " " + format_double(v);
  out += "\ncells";
  for (auto n : g.cells()) out += " " + std::to_string(n);
  out += '\n';
  const std::size_t run = g.cells()[0];
  const auto flags = mask.cells();
  for (std::size_t start = 0; start < flags.size(); start += run) {
    for (std::size_t k = 0; k < run; ++k) out += flags[start + k] ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_mask(const fs::path& path, const FeasibilityMask& mask) { write_file_atomic(path, format_mask(mask)); }

FeasibilityMask parse_mask(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "# kdetrack-mask v1") {
    throw DataError(source + ": expected header '# kdetrack-mask v1'");
  }
  std::size_t line_no = 1;
  auto next_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      ++line_no;
      auto t = trim(line);
      if (!t.empty() && t.front() != '#') return t;
    }
    throw DataError(source + ": unexpected end of file");
  };
  auto keyed = [&](const std::string& key) {
    auto toks = tokens(next_line());
    if (toks.empty() || toks[0] != key) throw DataError(location(source, line_no) + ": expected '" + key + "'");
    toks.erase(toks.begin());
    return toks;
  };

  const auto dim_tok = keyed("dim");
  if (dim_tok.size() != 1) throw DataError(location(source, line_no) + ": dim takes one value");
  const std::size_t d = parse_count(dim_tok[0], location(source, line_no));
  auto read_vec = [&](const std::string& key) {
    const auto toks = keyed(key);
    if (toks.size() != d) throw DimensionError(location(source, line_no) + ": " + key + " needs " + std::to_string(d) + " values");
    std::vector<double> v;
    for (const auto& t : toks) v.push_back(parse_double(t, location(source, line_no)));
    return Point(std::move(v));
  };
  Point lo = read_vec("lo");
  Point hi = read_vec("hi");
  const auto cell_toks = keyed("cells");
  if (cell_toks.size() != d) throw DimensionError(location(source, line_no) + ": cells needs " + std::to_string(d) + " values");
  std::vector<std::size_t> cells;
  for (const auto& t : cell_toks) cells.push_back(parse_count(t, location(source, line_no)));
  Grid grid(std::move(lo), std::move(hi), std::move(cells));

  std::vector<std::uint8_t> flags;
  flags.reserve(grid.cell_count());
  const std::size_t run = grid.cells()[0];
  while (flags.size() < grid.cell_count()) {
    const auto row = next_line();
    if (row.size() != run) {
      throw DataError(location(source, line_no) + ": mask row has " + std::to_string(row.size()) + " cells, expected " +
                      std::to_string(run));
    }
    for (char c : row) {
      if (c != '0' && c != '1') throw DataError(location(source, line_no) + ": mask rows hold only 0 and 1");
      flags.push_back(c == '1' ? 1 : 0);
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (!t.empty() && t.front() != '#') throw DataError(location(source, line_no) + ": extra mask rows");
  }
  return FeasibilityMask(std::move(grid), std::move(flags));
}

FeasibilityMask read_mask(const fs::path& path) {
  auto in = open_input(path);
  return parse_mask(in, path.string());
}

// --- forecasts ------------------------------------------------------------

std::string format_forecast(std::span<const ForecastStep> steps, std::size_t dim, const ForecastConfig& cfg, double t0) {
  std::string out = "# kdetrack-forecast v1 dim=" + std::to_string(dim) + " steps=" + std::to_string(steps.size()) +
                    " alpha=" + format_double(cfg.alpha) + " kernel=" + to_string(cfg.kernel.family()) +
                    " t0=" + format_double(t0) + " dt=" + format_double(cfg.dt) +
                    " samples=" + std::to_string(cfg.hdr_samples) + "\n";
  for (const auto& s : steps) {
    out += std::to_string(s.step) + " " + format_double(s.time);
    if (!s.present()) {
      out += " absent\n";
      continue;
    }
    for (double v : s.estimate->prediction) out += " " + format_double(v);
    out += " " + format_double(s.estimate->region.threshold()) + " " + std::to_string(s.support_count) + "\n";
  }
  return out;
}

ForecastFile parse_forecast(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  const auto fields = header_fields(line, "kdetrack-forecast", source);
  ForecastFile file;
  file.dim = parse_count(require_field(fields, "dim", source), source);
  if (file.dim == 0) throw DataError(source + ": dim must be >= 1");
  file.alpha = parse_double(require_field(fields, "alpha", source), source);
  file.kernel = parse_kernel_family(require_field(fields, "kernel", source));
  file.t0 = parse_double(require_field(fields, "t0", source), source);
  file.dt = parse_double(require_field(fields, "dt", source), source);
  if (const auto it = fields.find("samples"); it != fields.end()) file.hdr_samples = parse_count(it->second, source);
  const std::size_t expected = parse_count(require_field(fields, "steps", source), source);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto toks = tokens(t);
    const auto where = location(source, line_no);
    ForecastRow row;
    if (toks.size() == 3 && toks[2] == "absent") {
      row.step = parse_count(toks[0], where);
      row.time = parse_double(toks[1], where);
    } else if (toks.size() == file.dim + 4) {
      row.step = parse_count(toks[0], where);
      row.time = parse_double(toks[1], where);
      std::vector<double> p(file.dim);
      for (std::size_t j = 0; j < file.dim; ++j) p[j] = parse_double(toks[2 + j], where);
      row.prediction = Point(std::move(p));
      row.threshold = parse_double(toks[2 + file.dim], where);
      row.support_count = parse_count(toks[3 + file.dim], where);
    } else {
      throw DimensionError(where + ": expected " + std::to_string(file.dim + 4) + " fields or 'absent'");
    }
    if (!file.rows.empty() && row.step <= file.rows.back().step) throw DataError(where + ": step indices must increase");
    file.rows.push_back(std::move(row));
  }
  if (file.rows.size() != expected) {
    throw DataError(source + ": header declares " + std::to_string(expected) + " steps, found " +
                    std::to_string(file.rows.size()));
  }
  return file;
}

ForecastFile read_forecast(const fs::path& path) {
  auto in = open_input(path);
  return parse_forecast(in, path.string());
}

// --- support --------------------------------------------------------------

const SupportStep* SupportFile::find(std::size_t step) const {
  const auto it = std::find_if(steps.begin(), steps.end(), [&](const SupportStep& s) { return s.step == step; });
  return it == steps.end() ? nullptr : &*it;
}

DensityEstimate SupportFile::density(std::size_t step) const {
  const SupportStep* s = find(step);
  if (!s) throw DataError("support file has no entry for step " + std::to_string(step));
  return DensityEstimate::build(s->centers, s->bandwidth, Kernel1D(kernel));
}

std::string format_support(std::span<const ForecastStep> steps, std::size_t dim, KernelFamily kernel) {
  std::string out = "# kdetrack-support v1 dim=" + std::to_string(dim) + " kernel=" + to_string(kernel) + "\n";
  for (const auto& s : steps) {
    if (!s.present()) continue;
    const DensityEstimate& f = *s.estimate->density;
    out += "step " + std::to_string(s.step) + " " + format_double(s.time) + " " + std::to_string(f.size()) + "\nh";
    for (double v : f.bandwidth().values()) out += " " + format_double(v);
    out += '\n';
    for (std::size_t i = 0; i < f.size(); ++i) {
      out += 'x';
      for (double v : f.center(i)) out += " " + format_double(v);
      out += '\n';
    }
  }
  return out;
}

SupportFile parse_support(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file");
  const auto fields = header_fields(line, "kdetrack-support", source);
  SupportFile file;
  file.dim = parse_count(require_field(fields, "dim", source), source);
  if (file.dim == 0) throw DataError(source + ": dim must be >= 1");
  file.kernel = parse_kernel_family(require_field(fields, "kernel", source));

  std::size_t line_no = 1;
  std::size_t expected_centers = 0;
  std::optional<std::vector<double>> h;
  auto finish = [&](std::size_t at) {
    if (file.steps.empty()) return;
    auto& s = file.steps.back();
    if (!h) throw DataError(location(source, at) + ": step " + std::to_string(s.step) + " lacks an 'h' row");
    if (s.centers.size() != expected_centers) {
      throw DataError(location(source, at) + ": step " + std::to_string(s.step) + " declares " +
                      std::to_string(expected_centers) + " centers, found " + std::to_string(s.centers.size()));
    }
    s.bandwidth = BandwidthVector(*h);
    h.reset();
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto toks = tokens(t);
    const auto where = location(source, line_no);
    if (toks[0] == "step") {
      finish(line_no);
      if (toks.size() != 4) throw DataError(where + ": expected 'step <i> <t> <n>'");
      SupportStep s;
      s.step = parse_count(toks[1], where);
      s.time = parse_double(toks[2], where);
      expected_centers = parse_count(toks[3], where);
      file.steps.push_back(std::move(s));
    } else if (toks[0] == "h" || toks[0] == "x") {
      if (file.steps.empty()) throw DataError(where + ": row before any 'step'");
      if (toks.size() != file.dim + 1) throw DimensionError(where + ": expected " + std::to_string(file.dim) + " values");
      std::vector<double> v(file.dim);
      for (std::size_t j = 0; j < file.dim; ++j) v[j] = parse_double(toks[j + 1], where);
      if (toks[0] == "h") {
        if (h) throw DataError(where + ": duplicate 'h' row");
        h = std::move(v);
      } else {
        file.steps.back().centers.emplace_back(std::move(v));
      }
    } else {
      throw DataError(where + ": unknown row tag '" + toks[0] + "'");
    }
  }
  finish(line_no);
  return file;
}

SupportFile read_support(const fs::path& path) {
  auto in = open_input(path);
  return parse_support(in, path.string());
}

std::vector<ForecastStep> rebuild_steps(const ForecastFile& file, const SupportFile& support) {
  if (support.dim != file.dim) throw DimensionError("forecast and support files differ in dimension");
  std::vector<ForecastStep> out;
  out.reserve(file.rows.size());
  for (const auto& row : file.rows) {
    ForecastStep step;
    step.step = row.step;
    step.time = row.time;
    step.support_count = row.support_count;
    if (row.prediction) {
      auto f = std::make_shared<const DensityEstimate>(support.density(row.step));
      HdrRegion region(f, file.alpha, row.threshold, file.hdr_samples);
      step.estimate = StepEstimate{*row.prediction, f, std::move(region)};
    }
    out.push_back(std::move(step));
  }
  return out;
}

// --- grid exports ---------------------------------------------------------

std::string format_density_grid(const DensityEstimate& f, const Grid& grid) {
  require_dimension(f.dim(), grid.dim(), "density grid");
  std::string out;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Point x = grid.center(c);
    for (double v : x) out += format_double(v) + " ";
    out += format_double(f.evaluate(x)) + "\n";
  }
  return out;
}

std::string format_hdr_grid(const HdrRegion& region, const Grid& grid) {
  require_dimension(region.source().dim(), grid.dim(), "HDR grid");
  std::string out;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Point x = grid.center(c);
    for (double v : x) out += format_double(v) + " ";
    out += region.contains(x) ? "1\n" : "0\n";
  }
  return out;
}

// --- metadata -------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_metadata(const std::map<std::string, std::string>& params, std::uint64_t seed) {
  std::string body;
  for (const auto& [k, v] : params) body += k + " = " + v + "\n";
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(body)));
  return "# kdetrack run metadata\nversion = " KDETRACK_VERSION "\nconfig_hash = " + std::string(hash) +
         "\nseed = " + std::to_string(seed) + "\n" + body;
}

}  // namespace kdetrack::io
