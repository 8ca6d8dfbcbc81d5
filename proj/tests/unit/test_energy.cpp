#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kdetrack/energy.hpp"
#include "kdetrack/errors.hpp"
#include "support/oracles.hpp"

using namespace kdetrack;

namespace {

std::vector<Observation> history_of(const std::vector<Point>& pts) {
  std::vector<Observation> out;
  for (std::size_t i = 0; i < pts.size(); ++i) out.push_back({static_cast<double>(i), pts[i]});
  return out;
}

// One very wide well: the field is constant to well below double precision.
EnergyField constant_field(const Grid& grid) {
  Point mid = grid.lo();
  for (std::size_t j = 0; j < mid.dim(); ++j) mid[j] = 0.5 * (grid.lo()[j] + grid.hi()[j]);
  const std::vector<double> sigma{1e6};
  return EnergyField::build(history_of({mid}), LagrangianKind::gaussian_wells, sigma, grid);
}

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const double vx = b[0] - a[0];
  const double vy = b[1] - a[1];
  const double len2 = vx * vx + vy * vy;
  double s = len2 > 0 ? ((p[0] - a[0]) * vx + (p[1] - a[1]) * vy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - s * vx, p[1] - a[1] - s * vy);
}

std::vector<Point> quarter_circle(double r, std::size_t n) {
  std::vector<Point> pts;
  for (std::size_t k = 0; k < n; ++k) {
    const double th = 0.5 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1);
    pts.push_back(Point{r * std::cos(th), r * std::sin(th)});
  }
  return pts;
}

}  // namespace

TEST_CASE("lagrangian formulas") {
  const auto h = history_of({Point{0, 0}});
  const std::vector<double> one{1.0};
  CHECK(lagrangian_at(LagrangianKind::gaussian_wells, h, one, Point{0, 0}.coords()) ==
        doctest::Approx(1.0 - 1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  CHECK(lagrangian_at(LagrangianKind::gaussian_wells, h, one, Point{0, 0}.coords()) ==
        doctest::Approx(0.6011).epsilon(1e-4));
  CHECK(lagrangian_at(LagrangianKind::least_squares, h, one, Point{3, 4}.coords()) == doctest::Approx(25.0));
  const std::vector<double> two{2.0};
  CHECK(lagrangian_at(LagrangianKind::least_squares, h, two, Point{3, 4}.coords()) == doctest::Approx(12.5));

  const auto far = history_of({Point{0, 0}, Point{100, 0}, Point{0, 100}});
  CHECK(lagrangian_at(LagrangianKind::gaussian_wells, far, one, Point{500, 500}.coords()) ==
        doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("field cells equal the formula at cell centers") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.5, 9.5);
  std::vector<Point> pts;
  for (int i = 0; i < 15; ++i) pts.push_back(Point{u(gen), u(gen)});
  const auto hist = history_of(pts);
  std::vector<double> sig;
  for (int i = 0; i < 15; ++i) sig.push_back(0.5 + 0.1 * i);
  const Grid grid(Point{0, 0}, Point{10, 10}, {23, 17});
  for (auto kind : {LagrangianKind::gaussian_wells, LagrangianKind::least_squares}) {
    const auto field = EnergyField::build(hist, kind, sig, grid);
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const Point x = grid.center(c);
      double v = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d2 = (x[0] - pts[i][0]) * (x[0] - pts[i][0]) + (x[1] - pts[i][1]) * (x[1] - pts[i][1]);
        if (kind == LagrangianKind::least_squares) {
          v += d2 / sig[i];
        } else {
          v += 1.0 - std::exp(-d2 / (2 * sig[i] * sig[i])) / std::sqrt(2 * std::numbers::pi * sig[i] * sig[i]);
        }
      }
      CHECK(field.value(c) == doctest::Approx(v).epsilon(1e-9));
      CHECK(field.value(c) >= 0.0);
      if (kind == LagrangianKind::gaussian_wells) CHECK(field.value(c) <= static_cast<double>(pts.size()));
    }
  }
}

TEST_CASE("least-squares field near a single point") {
  const Grid grid(Point{-5, -5}, Point{5, 5}, {101, 101});
  const std::vector<double> one{1.0};
  const auto field = EnergyField::build(history_of({Point{0, 0}}), LagrangianKind::least_squares, one, grid);
  const auto c0 = grid.locate(Point{0, 0}).value();
  CHECK(field.value(c0) < grid.diagonal() * grid.diagonal());
  const auto c1 = grid.locate(Point{1, 0}).value();
  const auto c2 = grid.locate(Point{2, 0}).value();
  CHECK(field.value(c2) / field.value(c1) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("field construction errors") {
  const Grid grid(Point{0, 0}, Point{1, 1}, {4, 4});
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(EnergyField::build({}, LagrangianKind::least_squares, one, grid), DataError);
  const auto h = history_of({Point{0.5, 0.5}});
  const std::vector<double> zero{0.0};
  CHECK_THROWS_AS(EnergyField::build(h, LagrangianKind::least_squares, zero, grid), ConfigError);
  const std::vector<double> tiny{0.2};
  CHECK_THROWS_AS(EnergyField::build(h, LagrangianKind::gaussian_wells, tiny, grid), ConfigError);
  CHECK_NOTHROW(EnergyField::build(h, LagrangianKind::least_squares, tiny, grid));
  const std::vector<double> three{1, 1, 1};
  CHECK_THROWS_AS(EnergyField::build(h, LagrangianKind::least_squares, three, grid), ConfigError);
  CHECK_THROWS_AS(EnergyField::build(history_of({Point{2, 2}}), LagrangianKind::least_squares, one, grid), DataError);
}

TEST_CASE("pheromone sigmas widen with age") {
  const std::vector<Observation> h{{0.0, Point{0.0}}, {2.0, Point{1.0}}, {5.0, Point{2.0}}};
  const auto s = pheromone_sigmas(h, 0.5, 0.1);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == doctest::Approx(0.5 * (1 + 0.1 * 5)));
  CHECK(s[1] == doctest::Approx(0.5 * (1 + 0.1 * 3)));
  CHECK(s[2] == doctest::Approx(0.5));
  const auto flat = pheromone_sigmas(h, 0.7, 0.0);
  for (double v : flat) CHECK(v == 0.7);
}

TEST_CASE("constant field gives a straight path") {
  const Grid grid(Point{-1, -5}, Point{11, 5}, {120, 100});
  const auto field = constant_field(grid);
  const double v = field.value(0);
  const auto path = min_energy_path(field, nullptr, Point{0, 0}, Point{10, 0});
  CHECK(path.polyline.front() == Point{0, 0});
  CHECK(path.polyline.back() == Point{10, 0});
  for (const auto& p : path.polyline) CHECK(std::abs(p[1]) <= grid.width(1));
  CHECK(std::abs(path.cost - v * 10.0) <= v * grid.diagonal());
}

TEST_CASE("constant field paths in any direction hug the chord") {
  const Grid grid(Point{0, 0}, Point{10, 10}, {50, 50});
  const auto field = constant_field(grid);
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.1, 9.9);
  for (int k = 0; k < 50; ++k) {
    const Point a{u(rng), u(rng)};
    const Point b{u(rng), u(rng)};
    const auto path = min_energy_path(field, nullptr, a, b);
    for (const auto& p : path.polyline) CHECK(point_segment_distance(p, a, b) <= grid.diagonal());
    CHECK(path.cost == doctest::Approx(cell_path_cost(field, path.cells)));
  }
}

TEST_CASE("path threads the gap in a wall") {
  const Grid grid(Point{0, 0}, Point{10, 10}, {50, 50});
  const auto mask = FeasibilityMask::from_predicate(grid, [](const Point& x) {
    const bool wall = x[0] > 4.8 && x[0] < 5.2;
    const bool gap = x[1] > 8.0 && x[1] < 9.0;
    return !wall || gap;
  });
  const auto field = constant_field(grid);
  const auto path = min_energy_path(field, &mask, Point{1, 1}, Point{9, 1});
  bool through_gap = false;
  for (std::size_t c : path.cells) {
    CHECK(mask.feasible(c));
    const Point x = grid.center(c);
    if (x[0] > 4.8 && x[0] < 5.2) through_gap = through_gap || (x[1] > 8.0 && x[1] < 9.0);
  }
  CHECK(through_gap);
}

TEST_CASE("path errors") {
  const Grid grid(Point{0, 0}, Point{10, 10}, {20, 20});
  const auto field = constant_field(grid);
  const auto walled = FeasibilityMask::from_predicate(grid, [](const Point& x) { return x[0] < 4.0 || x[0] > 6.0; });
  CHECK_THROWS_AS(min_energy_path(field, &walled, Point{1, 1}, Point{9, 1}), PathError);
  CHECK_THROWS_AS(min_energy_path(field, &walled, Point{5, 1}, Point{9, 1}), PathError);
  CHECK_THROWS_AS(min_energy_path(field, nullptr, Point{-1, 1}, Point{9, 1}), PathError);
  const auto other = FeasibilityMask::all_feasible(Grid(Point{0, 0}, Point{10, 10}, {10, 10}));
  CHECK_THROWS_AS(min_energy_path(field, &other, Point{1, 1}, Point{9, 1}), ConfigError);
}

TEST_CASE("same-cell endpoints") {
  const Grid grid(Point{0, 0}, Point{10, 10}, {5, 5});
  const auto field = constant_field(grid);
  const auto path = min_energy_path(field, nullptr, Point{1, 1}, Point{1.5, 1.2});
  REQUIRE(path.polyline.size() == 2);
  CHECK(path.cost == 0.0);
}

TEST_CASE("path costs match a brute-force Dijkstra") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.3, 9.7);
  std::bernoulli_distribution blocked(0.2);
  const std::size_t nx = 14;
  const std::size_t ny = 11;
  const Grid grid(Point{0, 0}, Point{10, 10}, {nx, ny});
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 6; ++i) pts.push_back(Point{u(gen), u(gen)});
    const std::vector<double> sig{1.0};
    const auto field = EnergyField::build(history_of(pts), trial % 2 ? LagrangianKind::least_squares
                                                                     : LagrangianKind::gaussian_wells,
                                          sig, grid);
    std::vector<std::uint8_t> flags(grid.cell_count());
    std::vector<bool> open(grid.cell_count());
    for (std::size_t c = 0; c < flags.size(); ++c) {
      open[c] = !blocked(gen);
      flags[c] = open[c] ? 1 : 0;
    }
    const Point a{u(gen), u(gen)};
    const Point b{u(gen), u(gen)};
    const auto ca = grid.locate(a).value();
    const auto cb = grid.locate(b).value();
    open[ca] = open[cb] = true;
    flags[ca] = flags[cb] = 1;
    const FeasibilityMask mask(grid, flags);
    std::vector<double> values(field.values().begin(), field.values().end());
    const double expected = oracle::grid_dijkstra_2d(values, open, nx, ny, grid.width(0), grid.width(1), ca, cb);
    if (std::isinf(expected)) {
      CHECK_THROWS_AS(min_energy_path(field, &mask, a, b), PathError);
      continue;
    }
    const auto path = min_energy_path(field, &mask, a, b);
    CHECK(path.cost == doctest::Approx(expected).epsilon(1e-9));
    CHECK(cell_path_cost(field, path.cells) == doctest::Approx(path.cost).epsilon(1e-12));
  }
}

TEST_CASE("optimal cost never exceeds the straight cell row") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(0.5, 9.5);
  const Grid grid(Point{0, 0}, Point{10, 10}, {40, 40});
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(Point{u(gen), u(gen)});
    const std::vector<double> sig{1.0};
    const auto field = EnergyField::build(history_of(pts), LagrangianKind::gaussian_wells, sig, grid);
    const double y = u(gen);
    const Point a{0.2, y};
    const Point b{9.8, y};
    const auto path = min_energy_path(field, nullptr, a, b);
    std::vector<std::size_t> row;
    const auto ia = grid.multi_index(grid.locate(a).value());
    const auto ib = grid.multi_index(grid.locate(b).value());
    for (std::size_t i = ia[0]; i <= ib[0]; ++i) {
      const std::vector<std::size_t> m{i, ia[1]};
      row.push_back(grid.linear_index(m));
    }
    CHECK(path.cost <= cell_path_cost(field, row) + 1e-12);
  }
}

TEST_CASE("least-squares quarter-circle path matches the brute-force oracle") {
  const auto arc = quarter_circle(5.0, 200);
  const std::size_t n = 28;
  const Grid grid(Point{-1, -1}, Point{6, 6}, {n, n});
  const std::vector<double> sig{1.0};
  const auto field = EnergyField::build(history_of(arc), LagrangianKind::least_squares, sig, grid);
  const Point a{5, 0};
  const Point b{0, 5};
  const auto path = min_energy_path(field, nullptr, a, b);
  std::vector<double> values(field.values().begin(), field.values().end());
  const std::vector<bool> open(grid.cell_count(), true);
  const double expected = oracle::grid_dijkstra_2d(values, open, n, n, grid.width(0), grid.width(1),
                                                   grid.locate(a).value(), grid.locate(b).value());
  CHECK(path.cost == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("least-squares path inside a ring-shaped feasible region tracks the circle") {
  const auto arc = quarter_circle(5.0, 200);
  const Grid grid(Point{-1, -1}, Point{6, 6}, {140, 140});
  const auto ring = FeasibilityMask::from_predicate(grid, [&](const Point& x) {
    return std::abs(std::hypot(x[0], x[1]) - 5.0) <= 1.5 * grid.max_width();
  });
  const std::vector<double> sig{1.0};
  const auto field = EnergyField::build(history_of(arc), LagrangianKind::least_squares, sig, grid);
  const auto path = min_energy_path(field, &ring, Point{5, 0}, Point{0, 5});
  for (const auto& p : path.polyline) {
    CHECK(std::abs(std::hypot(p[0], p[1]) - 5.0) <= 2.0 * grid.max_width());
  }
}

TEST_CASE("densify a straight pair") {
  const Grid grid(Point{-1, -1}, Point{2, 1}, {60, 40});
  const auto field = constant_field(grid);
  const std::vector<Observation> sub{{0.0, Point{0, 0}}, {1.0, Point{1, 0}}};
  const auto dense = densify(sub, &field, nullptr, 0.25);
  REQUIRE(dense.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(dense.time(k) == doctest::Approx(0.25 * k));
    CHECK(std::hypot(dense.points[k][0] - 0.25 * k, dense.points[k][1]) <= grid.max_width());
  }
  CHECK(dense.points.front() == Point{0, 0});
  CHECK(dense.points.back() == Point{1, 0});
}

TEST_CASE("densify leaves uniform input alone") {
  std::vector<Observation> sub;
  for (int k = 0; k < 9; ++k) sub.push_back({0.5 * k, Point{std::sin(k * 0.3), 0.1 * k}});
  CHECK_FALSE(needs_pathfinding(sub, 0.5));
  const auto dense = densify(sub, nullptr, nullptr, 0.5);
  REQUIRE(dense.size() == sub.size());
  for (std::size_t k = 0; k < sub.size(); ++k) CHECK(euclidean(dense.points[k].coords(), sub[k].x.coords()) <= 1e-12);
}

TEST_CASE("densify downsamples a dense pair and drops the remainder") {
  std::vector<Observation> sub;
  for (int k = 0; k <= 10; ++k) sub.push_back({0.1 * k, Point{0.1 * k}});
  const auto dense = densify(sub, nullptr, nullptr, 0.3);
  REQUIRE(dense.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(dense.points[k][0] == doctest::Approx(0.3 * k).epsilon(1e-12));
}

TEST_CASE("densify along a quarter circle keeps even arc spacing") {
  const auto arc = quarter_circle(5.0, 300);
  const Grid grid(Point{-1, -1}, Point{6, 6}, {140, 140});
  const auto ring = FeasibilityMask::from_predicate(grid, [&](const Point& x) {
    return std::abs(std::hypot(x[0], x[1]) - 5.0) <= 1.5 * grid.max_width();
  });
  const std::vector<double> sig{1.0};
  const auto field = EnergyField::build(history_of(arc), LagrangianKind::least_squares, sig, grid);
  const std::vector<Observation> sub{{0.0, Point{5, 0}}, {10.0, Point{0, 5}}};
  const auto dense = densify(sub, &field, &ring, 1.0);
  REQUIRE(dense.size() == 11);
  for (const auto& p : dense.points) CHECK(std::abs(std::hypot(p[0], p[1]) - 5.0) <= 2.0 * grid.max_width());
  // Arc-length oracle: angles should advance by (pi/2)/10 per step.
  const double step = 0.5 * std::numbers::pi / 10.0;
  for (std::size_t k = 1; k < dense.size(); ++k) {
    const double a0 = std::atan2(dense.points[k - 1][1], dense.points[k - 1][0]);
    const double a1 = std::atan2(dense.points[k][1], dense.points[k][0]);
    CHECK(std::abs((a1 - a0) - step) <= 0.1 * step);
  }
}

TEST_CASE("densified points are feasible") {
  const Grid grid(Point{0, 0}, Point{10, 10}, {80, 80});
  const auto mask = FeasibilityMask::from_predicate(grid, [](const Point& x) {
    return std::hypot(x[0] - 5.0, x[1] - 5.0) > 2.0;
  });
  const auto field = constant_field(grid);
  const std::vector<Observation> sub{{0.0, Point{1, 5}}, {4.0, Point{9, 5}}, {6.0, Point{9, 9}}, {6.1, Point{9, 9.1}}};
  const auto dense = densify(sub, &field, &mask, 0.05);
  CHECK(dense.size() == 123);
  for (const auto& p : dense.points) CHECK(mask.feasible_at(p));
}

TEST_CASE("densify argument errors") {
  const std::vector<Observation> backwards{{1.0, Point{0.0}}, {0.5, Point{1.0}}};
  CHECK_THROWS_AS(densify(backwards, nullptr, nullptr, 0.1), DataError);
  const std::vector<Observation> ok{{0.0, Point{0.0}}, {1.0, Point{1.0}}};
  CHECK_THROWS_AS(densify(ok, nullptr, nullptr, 0.0), ConfigError);
  CHECK_THROWS_AS(densify(ok, nullptr, nullptr, 0.1), ConfigError);
  CHECK_THROWS_AS(densify({}, nullptr, nullptr, 0.1), DataError);
}

TEST_CASE("pointwise least squares converges to the mean") {
  const Grid grid(Point{-2, -2}, Point{2, 2}, {400, 400});
  std::mt19937_64 gen(1);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<Trajectory> copies;
  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double dx = noise(gen);
    const double dy = noise(gen);
    mx += dx / 50;
    my += dy / 50;
    copies.emplace_back(std::vector<Observation>{{0.0, Point{dx, dy}}, {1.0, Point{dx, dy}}});
  }
  const std::vector<double> sig{1.0};
  const auto path = pointwise_least_squares_path(copies, sig, grid, nullptr, 0.0, 0.5, 3);
  REQUIRE(path.size() == 3);
  for (const auto& p : path.points) CHECK(std::hypot(p[0] - mx, p[1] - my) <= grid.diagonal());
}

TEST_CASE("mask validation") {
  const Grid grid(Point{0, 0}, Point{1, 1}, {2, 2});
  CHECK_THROWS_AS(FeasibilityMask(grid, {0, 0, 0, 0}), DataError);
  CHECK_THROWS_AS(FeasibilityMask(grid, {1, 1}), DataError);
  const FeasibilityMask m(grid, {1, 0, 0, 1});
  CHECK(m.feasible_count() == 2);
  CHECK(m.feasible_at(Point{0.2, 0.2}));
  CHECK_FALSE(m.feasible_at(Point{0.7, 0.2}));
  CHECK_FALSE(m.feasible_at(Point{2.0, 0.2}));
}
