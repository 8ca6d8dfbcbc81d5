#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kdetrack/errors.hpp"
#include "kdetrack/geometry.hpp"
#include "kdetrack/trajectory.hpp"
#include "support/oracles.hpp"

using namespace kdetrack;

TEST_CASE("euclidean distance of a 3-4-5 triangle") {
  CHECK(distance(Point{0, 0}, Point{3, 4}, Metric::euclidean()) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("haversine quarter great circle") {
  CHECK(distance(Point{0, 0}, Point{0, 90}, Metric::haversine(1.0)) == doctest::Approx(std::numbers::pi / 2));
  const double expected = 3440.065 * std::numbers::pi / 2.0;
  CHECK(expected == doctest::Approx(5403.6).epsilon(1e-4));
  CHECK(distance(Point{0, 0}, Point{0, 90}, Metric::haversine(kEarthRadiusNm)) == doctest::Approx(expected));
}

TEST_CASE("haversine agrees with an independent great-circle formula") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(-89.0, 89.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  for (int k = 0; k < 500; ++k) {
    const Point a{lat(rng), lon(rng)};
    const Point b{lat(rng), lon(rng)};
    const double got = distance(a, b, Metric::haversine(kEarthRadiusNm));
    CHECK(got == doctest::Approx(oracle::great_circle(a[0], a[1], b[0], b[1], kEarthRadiusNm)).epsilon(1e-9));
  }
}

TEST_CASE("distance errors") {
  CHECK_THROWS_AS(distance(Point{0, 0}, Point{1, 2, 3}, Metric::euclidean()), DimensionError);
  CHECK_THROWS_AS(distance(Point{0, 0, 0}, Point{1, 2, 3}, Metric::haversine()), DimensionError);
  CHECK_THROWS_AS(Metric::haversine(0.0), ConfigError);
  CHECK_THROWS_AS(Metric::haversine(-2.0), ConfigError);
}

TEST_CASE("triangle inequality holds for both metrics") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-80.0, 80.0);
  for (const Metric m : {Metric::euclidean(), Metric::haversine(1.0), Metric::haversine(kEarthRadiusNm)}) {
    for (int k = 0; k < 1000; ++k) {
      const Point a{u(rng), u(rng)};
      const Point b{u(rng), u(rng)};
      const Point c{u(rng), u(rng)};
      CHECK(distance(a, c, m) <= distance(a, b, m) + distance(b, c, m) + 1e-9);
    }
  }
}

TEST_CASE("distance is symmetric and zero on identical points") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (int k = 0; k < 200; ++k) {
    const Point a{u(rng), u(rng)};
    const Point b{u(rng), u(rng)};
    CHECK(distance(a, b, Metric::euclidean()) == distance(b, a, Metric::euclidean()));
    CHECK(distance(a, a, Metric::euclidean()) == 0.0);
    CHECK(distance(a, a, Metric::haversine()) == doctest::Approx(0.0));
  }
}

TEST_CASE("haversine never exceeds half the circumference") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-90.0, 90.0);
  std::uniform_real_distribution<double> lon(-540.0, 540.0);
  const Metric m = Metric::haversine(2.5);
  for (int k = 0; k < 2000; ++k) {
    CHECK(distance(Point{lat(rng), lon(rng)}, Point{lat(rng), lon(rng)}, m) <= 2.5 * std::numbers::pi);
  }
  CHECK(distance(Point{0, 0}, Point{0, 180}, m) == doctest::Approx(2.5 * std::numbers::pi));
}

TEST_CASE("angle distance examples") {
  CHECK(angle_distance({Point{1, 2}}, {Point{1, 2}}) == doctest::Approx(0.0));
  CHECK(angle_distance({Point{1, 0}}, {Point{0, 1}}) == doctest::Approx(1.0));
  CHECK(angle_distance({Point{1, 0}}, {Point{-1, 0}}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(angle_distance({Point{0, 0}}, {Point{1, 0}}), ZeroVelocityError);
  CHECK_THROWS_AS(angle_distance({Point{1, 0}}, {Point{0, 0}}), ZeroVelocityError);
  CHECK_THROWS_AS(angle_distance({Point{1, 0}}, {Point{0, 0, 1}}), DimensionError);
}

TEST_CASE("angle distance is scale invariant and bounded") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> s(0.01, 100.0);
  for (int k = 0; k < 1000; ++k) {
    const Point u{n(rng), n(rng), n(rng)};
    const Point v{n(rng), n(rng), n(rng)};
    const double base = angle_distance({u}, {v});
    CHECK(base >= 0.0);
    CHECK(base <= 2.0);
    CHECK(std::abs(angle_distance({u * s(rng)}, {v * s(rng)}) - base) <= 1e-12);
  }
}

TEST_CASE("finite difference velocity examples") {
  const Trajectory a({{0.0, Point{0, 0}}, {2.0, Point{4, 0}}});
  CHECK(finite_difference_velocity(a, 1).components == Point{2, 0});

  const Trajectory b({{0.0, Point{1, 1}}, {1.0, Point{1, 1}}});
  const Velocity vb = finite_difference_velocity(b, 1);
  CHECK(vb.components == Point{0, 0});
  CHECK(vb.is_zero());

  const Trajectory c({{0.0, Point{0, 0}}, {0.5, Point{1, -1}}});
  CHECK(finite_difference_velocity(c, 1).components == Point{2, -2});
}

TEST_CASE("finite difference velocity errors") {
  const Trajectory a({{0.0, Point{0, 0}}, {2.0, Point{4, 0}}});
  CHECK_THROWS_AS(finite_difference_velocity(a, 0), DataError);
  CHECK_THROWS_AS(finite_difference_velocity(a, 2), DataError);
  const Trajectory dup({{1.0, Point{0, 0}}, {1.0, Point{4, 0}}});
  CHECK_THROWS_AS(finite_difference_velocity(dup, 1), DataError);
}

TEST_CASE("metric names round-trip") {
  CHECK(parse_metric_kind(to_string(MetricKind::euclidean)) == MetricKind::euclidean);
  CHECK(parse_metric_kind(to_string(MetricKind::haversine)) == MetricKind::haversine);
  CHECK_THROWS_AS(parse_metric_kind("manhattan"), ConfigError);
}

TEST_CASE("trajectory validation and interpolation") {
  CHECK_THROWS_AS(Trajectory({{0.0, Point{0, 0}}, {1.0, Point{1, 2, 3}}}), DimensionError);
  CHECK_THROWS_AS(Trajectory({{0.0, Point{0, NAN}}}), DataError);
  const Trajectory t({{0.0, Point{0, 0}}, {2.0, Point{2, 4}}});
  CHECK(t.position_at(1.0).value() == Point{1, 2});
  CHECK_FALSE(t.position_at(2.5).has_value());
  CHECK_FALSE(t.position_at(-0.1).has_value());
  const Trajectory bad({{0.0, Point{0, 0}}, {0.0, Point{1, 1}}});
  CHECK_FALSE(bad.strictly_increasing());
  CHECK_THROWS_AS(bad.require_strictly_increasing(), DataError);
}
