#include "kdetrack/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "kdetrack/errors.hpp"

namespace kdetrack {

FeasibilityMask::FeasibilityMask(Grid grid, std::vector<std::uint8_t> feasible)
    : grid_(std::move(grid)), feasible_(std::move(feasible)) {
  if (feasible_.size() != grid_.cell_count()) {
    throw DataError("feasibility mask: expected " + std::to_string(grid_.cell_count()) + " cells, got " +
                    std::to_string(feasible_.size()));
  }
  for (auto& f : feasible_) f = f ? 1 : 0;
  if (feasible_count() == 0) throw DataError("feasibility mask: no feasible cell");
}

FeasibilityMask FeasibilityMask::all_feasible(Grid grid) {
  std::vector<std::uint8_t> cells(grid.cell_count(), 1);
  return FeasibilityMask(std::move(grid), std::move(cells));
}

FeasibilityMask FeasibilityMask::from_predicate(Grid grid, const std::function<bool(const Point&)>& is_feasible) {
  std::vector<std::uint8_t> cells(grid.cell_count());
  for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = is_feasible(grid.center(c)) ? 1 : 0;
  return FeasibilityMask(std::move(grid), std::move(cells));
}

bool FeasibilityMask::feasible_at(std::span<const double> x) const {
  const auto cell = grid_.locate(x);
  return cell && feasible_[*cell] != 0;
}

std::size_t FeasibilityMask::feasible_count() const noexcept {
  return static_cast<std::size_t>(std::count(feasible_.begin(), feasible_.end(), std::uint8_t{1}));
}

FeasibilityPredicate FeasibilityMask::predicate() const {
  return [this](std::span<const double> x) { return feasible_at(x); };
}

std::string to_string(LagrangianKind kind) {
  return kind == LagrangianKind::least_squares ? "least_squares" : "gaussian_wells";
}

LagrangianKind parse_lagrangian_kind(const std::string& name) {
  if (name == "gaussian_wells") return LagrangianKind::gaussian_wells;
  if (name == "least_squares") return LagrangianKind::least_squares;
  throw ConfigError("unknown lagrangian '" + name + "' (expected gaussian_wells or least_squares)");
}

namespace {

double sigma_of(std::span<const double> sigmas, std::size_t i) { return sigmas.size() == 1 ? sigmas[0] : sigmas[i]; }

void check_sigmas(LagrangianKind kind, std::span<const Observation> history, std::span<const double> sigmas) {
  if (history.empty()) throw DataError("energy field: empty history");
  if (sigmas.size() != 1 && sigmas.size() != history.size()) {
    throw ConfigError("energy field: expected 1 or " + std::to_string(history.size()) + " sigmas, got " +
                      std::to_string(sigmas.size()));
  }
  for (double s : sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ConfigError("energy field: sigma must be positive and finite");
    if (kind == LagrangianKind::gaussian_wells && s < kMinGaussianWellSigma) {
      throw ConfigError("energy field: gaussian_wells sigma must be >= 1/sqrt(2 pi) ~ 0.3989 so well terms stay "
                        "non-negative; rescale coordinates or use least_squares");
    }
  }
}

double well_term(double d2, double sigma) {
  const double peak = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
  return 1.0 - peak * std::exp(-d2 / (2.0 * sigma * sigma));
}

}  // namespace

double lagrangian_at(LagrangianKind kind, std::span<const Observation> history, std::span<const double> sigmas,
                     std::span<const double> x, const Metric& metric) {
  check_sigmas(kind, history, sigmas);
  double total = 0.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double d = distance(x, history[i].x.coords(), metric);
    const double s = sigma_of(sigmas, i);
    total += kind == LagrangianKind::least_squares ? d * d / s : well_term(d * d, s);
  }
  return total;
}

std::vector<double> pheromone_sigmas(std::span<const Observation> history, double base_sigma, double rate) {
  if (history.empty()) return {};
  if (!(base_sigma > 0.0)) throw ConfigError("pheromone sigmas: base sigma must be positive");
  if (!(rate >= 0.0)) throw ConfigError("pheromone sigmas: rate must be non-negative");
  double latest = history.front().t;
  for (const auto& o : history) latest = std::max(latest, o.t);
  std::vector<double> out;
  out.reserve(history.size());
  for (const auto& o : history) out.push_back(base_sigma * (1.0 + rate * (latest - o.t)));
  return out;
}

EnergyField EnergyField::build(std::span<const Observation> history, LagrangianKind kind,
                               std::span<const double> sigmas, Grid grid, const Metric& metric) {
  check_sigmas(kind, history, sigmas);
  const std::size_t d = grid.dim();
  for (std::size_t i = 0; i < history.size(); ++i) {
    require_dimension(d, history[i].x.dim(), "energy field history");
    if (!grid.contains(history[i].x.coords())) {
      throw DataError("energy field: history point " + std::to_string(i) + " " + to_string(history[i].x) +
                      " lies outside the grid box");
    }
  }

  std::vector<double> values(grid.cell_count());
  if (kind == LagrangianKind::least_squares && metric.kind() == MetricKind::euclidean) {
    // sum_i w_i |x - x_i|^2 = W |x - m|^2 + sum_i w_i |x_i - m|^2 with m the weighted mean.
    double total_weight = 0.0;
    Point mean(d);
    for (std::size_t i = 0; i < history.size(); ++i) {
      const double w = 1.0 / sigma_of(sigmas, i);
      total_weight += w;
      for (std::size_t a = 0; a < d; ++a) mean[a] += w * history[i].x[a];
    }
    mean *= 1.0 / total_weight;
    double spread = 0.0;
    for (std::size_t i = 0; i < history.size(); ++i) {
      const double e = euclidean(history[i].x.coords(), mean.coords());
      spread += e * e / sigma_of(sigmas, i);
    }
    for (std::size_t c = 0; c < values.size(); ++c) {
      const double e = euclidean(grid.center(c).coords(), mean.coords());
      values[c] = total_weight * e * e + spread;
    }
  } else {
    for (std::size_t c = 0; c < values.size(); ++c) {
      values[c] = lagrangian_at(kind, history, sigmas, grid.center(c).coords(), metric);
    }
  }
  return EnergyField(std::move(grid), kind, std::vector<Observation>(history.begin(), history.end()),
                     std::move(values));
}

namespace {

struct Move {
  std::vector<std::ptrdiff_t> offset;
  // Offsets of the cells spanned by a diagonal move that must also be feasible.
  std::vector<std::vector<std::ptrdiff_t>> spanned;
  double length = 0.0;
};

std::vector<Move> neighbourhood(const Grid& grid) {
  const std::size_t d = grid.dim();
  std::size_t total = 1;
  for (std::size_t a = 0; a < d; ++a) total *= 3;
  std::vector<Move> moves;
  for (std::size_t code = 0; code < total; ++code) {
    Move m;
    m.offset.resize(d);
    std::size_t rest = code;
    bool zero = true;
    double len2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      m.offset[a] = static_cast<std::ptrdiff_t>(rest % 3) - 1;
      rest /= 3;
      if (m.offset[a] != 0) zero = false;
      len2 += static_cast<double>(m.offset[a] * m.offset[a]) * grid.width(a) * grid.width(a);
    }
    if (zero) continue;
    m.length = std::sqrt(len2);
    std::vector<std::size_t> moving;
    for (std::size_t a = 0; a < d; ++a) {
      if (m.offset[a] != 0) moving.push_back(a);
    }
    const std::size_t subsets = std::size_t{1} << moving.size();
    for (std::size_t s = 1; s + 1 < subsets; ++s) {
      std::vector<std::ptrdiff_t> sub(d, 0);
      for (std::size_t k = 0; k < moving.size(); ++k) {
        if (s & (std::size_t{1} << k)) sub[moving[k]] = m.offset[moving[k]];
      }
      m.spanned.push_back(std::move(sub));
    }
    moves.push_back(std::move(m));
  }
  return moves;
}

std::optional<std::size_t> shifted(const Grid& grid, const std::vector<std::size_t>& base,
                                   std::span<const std::ptrdiff_t> offset) {
  std::size_t linear = 0;
  for (std::size_t a = grid.dim(); a-- > 0;) {
    const auto i = static_cast<std::ptrdiff_t>(base[a]) + offset[a];
    if (i < 0 || i >= static_cast<std::ptrdiff_t>(grid.cells()[a])) return std::nullopt;
    linear = linear * grid.cells()[a] + static_cast<std::size_t>(i);
  }
  return linear;
}

bool is_open(const FeasibilityMask* mask, std::size_t cell) { return !mask || mask->feasible(cell); }

// Distance from x to the segment [a, b].
double segment_distance(std::span<const double> x, const Point& a, const Point& b) {
  double len2 = 0.0;
  double dot = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    len2 += (b[j] - a[j]) * (b[j] - a[j]);
    dot += (x[j] - a[j]) * (b[j] - a[j]);
  }
  const double s = len2 > 0.0 ? std::clamp(dot / len2, 0.0, 1.0) : 0.0;
  double d2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r = x[j] - a[j] - s * (b[j] - a[j]);
    d2 += r * r;
  }
  return std::sqrt(d2);
}

// Relative weight of the chord penalty. Equal-cost staircases are common on a
// lattice; this picks the one hugging a-b without moving genuine optima.
constexpr double kChordTieBreak = 1e-9;

}  // namespace

EnergyPath min_energy_path(const EnergyField& field, const FeasibilityMask* mask, const Point& a, const Point& b) {
  const Grid& grid = field.grid();
  if (mask && !(mask->grid() == grid)) throw ConfigError("min_energy_path: mask and field grids differ");
  require_dimension(grid.dim(), a.dim(), "min_energy_path start");
  require_dimension(grid.dim(), b.dim(), "min_energy_path end");
  const auto start = grid.locate(a);
  const auto goal = grid.locate(b);
  if (!start || !is_open(mask, *start)) throw PathError("min_energy_path: start " + to_string(a) + " is infeasible");
  if (!goal || !is_open(mask, *goal)) throw PathError("min_energy_path: end " + to_string(b) + " is infeasible");

  EnergyPath path;
  if (*start == *goal) {
    path.polyline = {a, b};
    path.cells = {*start};
    return path;
  }

  const auto moves = neighbourhood(grid);
  const double diag = grid.diagonal();
  std::vector<double> mid(grid.dim());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(grid.cell_count(), kInf);
  std::vector<std::size_t> prev(grid.cell_count(), kNone);
  std::vector<std::uint8_t> done(grid.cell_count(), 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[*start] = 0.0;
  queue.emplace(0.0, *start);
  while (!queue.empty()) {
    const auto [cost, cell] = queue.top();
    queue.pop();
    if (done[cell]) continue;
    done[cell] = 1;
    if (cell == *goal) break;
    const auto idx = grid.multi_index(cell);
    const double here = field.value(cell);
    for (const auto& m : moves) {
      const auto next = shifted(grid, idx, m.offset);
      if (!next || done[*next] || !is_open(mask, *next)) continue;
      bool clear = true;
      for (const auto& sub : m.spanned) {
        const auto side = shifted(grid, idx, sub);
        if (!side || !is_open(mask, *side)) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      for (std::size_t j = 0; j < mid.size(); ++j) {
        mid[j] = grid.lo()[j] + (static_cast<double>(idx[j]) + 0.5 + 0.5 * static_cast<double>(m.offset[j])) * grid.width(j);
      }
      const double penalty = 1.0 + kChordTieBreak * segment_distance(mid, a, b) / diag;
      const double candidate = cost + 0.5 * (here + field.value(*next)) * m.length * penalty;
      if (candidate < dist[*next]) {
        dist[*next] = candidate;
        prev[*next] = cell;
        queue.emplace(candidate, *next);
      }
    }
  }
  if (!done[*goal]) throw PathError("min_energy_path: no feasible path between " + to_string(a) + " and " + to_string(b));

  for (std::size_t c = *goal; c != kNone; c = prev[c]) path.cells.push_back(c);
  std::reverse(path.cells.begin(), path.cells.end());
  path.cost = cell_path_cost(field, path.cells);
  path.polyline.reserve(path.cells.size() + 2);
  path.polyline.push_back(a);
  for (std::size_t c : path.cells) path.polyline.push_back(grid.center(c));
  path.polyline.push_back(b);
  return path;
}

double cell_path_cost(const EnergyField& field, std::span<const std::size_t> cells) {
  const Grid& grid = field.grid();
  double total = 0.0;
  for (std::size_t k = 1; k < cells.size(); ++k) {
    const auto u = grid.multi_index(cells[k - 1]);
    const auto v = grid.multi_index(cells[k]);
    double len2 = 0.0;
    for (std::size_t a = 0; a < grid.dim(); ++a) {
      const auto step = static_cast<std::ptrdiff_t>(v[a]) - static_cast<std::ptrdiff_t>(u[a]);
      if (step < -1 || step > 1) throw PathError("cell_path_cost: cells are not neighbours");
      len2 += static_cast<double>(step * step) * grid.width(a) * grid.width(a);
    }
    if (len2 == 0.0) throw PathError("cell_path_cost: repeated cell");
    total += 0.5 * (field.value(cells[k - 1]) + field.value(cells[k])) * std::sqrt(len2);
  }
  return total;
}

namespace {

constexpr double kTimeSlack = 1e-9;

void check_subtrajectory(std::span<const Observation> subtraj, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("densify: dt must be positive");
  if (subtraj.empty()) throw DataError("densify: empty sub-trajectory");
  for (std::size_t j = 1; j < subtraj.size(); ++j) {
    if (!(subtraj[j].t > subtraj[j - 1].t)) {
      throw DataError("densify: timestamps not strictly increasing at row " + std::to_string(j));
    }
  }
}

bool gap_needs_path(double gap, double dt) { return gap > dt * (1.0 + kTimeSlack); }

// Point at arc-length fraction s along a polyline.
Point along(const std::vector<Point>& polyline, const std::vector<double>& cumulative, double s) {
  const double total = cumulative.back();
  if (total == 0.0) return polyline.front();
  const double target = std::clamp(s, 0.0, 1.0) * total;
  auto it = std::lower_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.begin()) return polyline.front();
  if (it == cumulative.end()) return polyline.back();
  const auto k = static_cast<std::size_t>(it - cumulative.begin());
  const double seg = cumulative[k] - cumulative[k - 1];
  const double w = seg > 0.0 ? (target - cumulative[k - 1]) / seg : 1.0;
  Point p = polyline[k - 1];
  for (std::size_t a = 0; a < p.dim(); ++a) p[a] += w * (polyline[k][a] - polyline[k - 1][a]);
  return p;
}

}  // namespace

bool needs_pathfinding(std::span<const Observation> subtraj, double dt) {
  for (std::size_t j = 1; j < subtraj.size(); ++j) {
    if (gap_needs_path(subtraj[j].t - subtraj[j - 1].t, dt)) return true;
  }
  return false;
}

DensePath densify(std::span<const Observation> subtraj, const EnergyField* field, const FeasibilityMask* mask,
                  double dt) {
  check_subtrajectory(subtraj, dt);
  const double t0 = subtraj.front().t;
  const double span = subtraj.back().t - t0;
  const auto steps = static_cast<std::size_t>(std::floor(span / dt + kTimeSlack));

  DensePath out;
  out.t0 = t0;
  out.dt = dt;
  out.points.reserve(steps + 1);

  std::size_t pair = 0;
  std::vector<Point> polyline;
  std::vector<double> cumulative;
  std::size_t polyline_pair = std::numeric_limits<std::size_t>::max();

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = out.time(k);
    while (pair + 2 < subtraj.size() && t > subtraj[pair + 1].t) ++pair;
    if (subtraj.size() == 1) {
      out.points.push_back(subtraj.front().x);
      continue;
    }
    const auto& lo = subtraj[pair];
    const auto& hi = subtraj[pair + 1];
    const double gap = hi.t - lo.t;
    const double s = std::clamp((t - lo.t) / gap, 0.0, 1.0);
    if (!gap_needs_path(gap, dt)) {
      Point p = lo.x;
      for (std::size_t a = 0; a < p.dim(); ++a) p[a] += s * (hi.x[a] - lo.x[a]);
      out.points.push_back(std::move(p));
      continue;
    }
    if (polyline_pair != pair) {
      if (!field) throw ConfigError("densify: a gap wider than dt needs an energy field");
      polyline = min_energy_path(*field, mask, lo.x, hi.x).polyline;
      cumulative.assign(polyline.size(), 0.0);
      for (std::size_t v = 1; v < polyline.size(); ++v) {
        cumulative[v] = cumulative[v - 1] + euclidean(polyline[v - 1].coords(), polyline[v].coords());
      }
      polyline_pair = pair;
    }
    out.points.push_back(along(polyline, cumulative, s));
  }
  return out;
}

DensePath pointwise_least_squares_path(std::span<const Trajectory> copies, std::span<const double> sigmas,
                                       const Grid& grid, const FeasibilityMask* mask, double t0, double dt,
                                       std::size_t count, const Metric& metric) {
  if (copies.empty()) throw DataError("least-squares path: no copies");
  if (sigmas.size() != 1 && sigmas.size() != copies.size()) {
    throw ConfigError("least-squares path: expected 1 or one sigma per copy");
  }
  if (!(dt > 0.0)) throw ConfigError("least-squares path: dt must be positive");
  if (mask && !(mask->grid() == grid)) throw ConfigError("least-squares path: mask and grid differ");

  DensePath out;
  out.t0 = t0;
  out.dt = dt;
  out.points.reserve(count);
  std::vector<Observation> snapshot;
  std::vector<double> snapshot_sigmas;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = out.time(k);
    snapshot.clear();
    snapshot_sigmas.clear();
    for (std::size_t i = 0; i < copies.size(); ++i) {
      if (auto p = copies[i].position_at(t)) {
        snapshot.push_back({t, std::move(*p)});
        snapshot_sigmas.push_back(sigma_of(sigmas, i));
      }
    }
    if (snapshot.empty()) throw NoSupportError("least-squares path: no copy covers t = " + std::to_string(t));
    const auto field = EnergyField::build(snapshot, LagrangianKind::least_squares, snapshot_sigmas, grid, metric);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      if (!is_open(mask, c)) continue;
      if (best == std::numeric_limits<std::size_t>::max() || field.value(c) < field.value(best)) best = c;
    }
    out.points.push_back(grid.center(best));
  }
  return out;
}

}  // namespace kdetrack
