#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library beyond reading plain data out of its types.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "kdetrack/trajectory.hpp"

namespace oracle {

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

// Great-circle distance via the spherical law of cosines on unit vectors,
// a different formula from haversine on purpose.
inline double great_circle(double lat1, double lon1, double lat2, double lon2, double radius) {
  const double k = std::numbers::pi / 180.0;
  const std::array<double, 3> u{std::cos(lat1 * k) * std::cos(lon1 * k), std::cos(lat1 * k) * std::sin(lon1 * k),
                                std::sin(lat1 * k)};
  const std::array<double, 3> v{std::cos(lat2 * k) * std::cos(lon2 * k), std::cos(lat2 * k) * std::sin(lon2 * k),
                                std::sin(lat2 * k)};
  const std::array<double, 3> c{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  const double cross = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
  const double dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
  return radius * std::atan2(cross, dot);
}

struct Row {
  double t;
  std::vector<double> x;
};

inline std::vector<Row> rows(const kdetrack::Trajectory& P) {
  std::vector<Row> out;
  for (const auto& o : P) out.push_back({o.t, std::vector<double>(o.x.begin(), o.x.end())});
  return out;
}

// Stage-1 predicate evaluated on every candidate with no early exit.
inline std::vector<std::size_t> stage1_scan(const kdetrack::Trajectory& P, double eps, double theta, double horizon) {
  const auto r = rows(P);
  const std::size_t n = r.size();
  std::vector<std::size_t> out;
  if (n < 3) return out;
  auto vel = [&](std::size_t i) {
    std::vector<double> v(r[i].x.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = (r[i].x[j] - r[i - 1].x[j]) / (r[i].t - r[i - 1].t);
    return v;
  };
  const auto vn = vel(n - 1);
  double nn = 0.0;
  for (double c : vn) nn += c * c;
  if (nn == 0.0) return out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const bool close = euclid(r[i].x, r[n - 1].x) < eps;
    const bool entered = euclid(r[i - 1].x, r[n - 1].x) >= eps;
    const bool lookahead = r[n - 1].t - r[i].t > horizon;
    if (!(close && entered && lookahead)) continue;
    const auto vi = vel(i);
    double dot = 0.0;
    double ni = 0.0;
    for (std::size_t j = 0; j < vi.size(); ++j) {
      dot += vi[j] * vn[j];
      ni += vi[j] * vi[j];
    }
    if (ni == 0.0) continue;
    const double delta = 1.0 - dot / std::sqrt(ni * nn);
    if (delta < theta) out.push_back(i);
  }
  return out;
}

// Plain O(V^2) Dijkstra on a 2-d grid (axis 0 fastest), 8-connected, no corner
// cutting, edge weight = mean of cell values times centre-to-centre length.
inline double grid_dijkstra_2d(const std::vector<double>& values, const std::vector<bool>& feasible, std::size_t nx,
                               std::size_t ny, double wx, double wy, std::size_t from, std::size_t to) {
  const std::size_t n = nx * ny;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> done(n, false);
  dist[from] = 0.0;
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t u = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (!done[k] && std::isfinite(dist[k]) && (u == n || dist[k] < dist[u])) u = k;
    }
    if (u == n) break;
    if (u == to) return dist[u];
    done[u] = true;
    const long ux = static_cast<long>(u % nx);
    const long uy = static_cast<long>(u / nx);
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const long vx = ux + dx;
        const long vy = uy + dy;
        if (vx < 0 || vy < 0 || vx >= static_cast<long>(nx) || vy >= static_cast<long>(ny)) continue;
        const std::size_t v = static_cast<std::size_t>(vy) * nx + static_cast<std::size_t>(vx);
        if (!feasible[v]) continue;
        if (dx != 0 && dy != 0) {
          const std::size_t side1 = static_cast<std::size_t>(uy) * nx + static_cast<std::size_t>(vx);
          const std::size_t side2 = static_cast<std::size_t>(vy) * nx + static_cast<std::size_t>(ux);
          if (!feasible[side1] || !feasible[side2]) continue;
        }
        const double len = std::hypot(static_cast<double>(dx) * wx, static_cast<double>(dy) * wy);
        const double w = 0.5 * (values[u] + values[v]) * len;
        if (dist[u] + w < dist[v]) dist[v] = dist[u] + w;
      }
    }
  }
  return dist[to];
}

struct Vec3 {
  double x, y, z;
};

// Classical RK4 for Lorenz63, written out longhand.
inline std::vector<Vec3> lorenz_rk4(Vec3 s, double sigma, double rho, double beta, double h, std::size_t count) {
  auto f = [&](const Vec3& p) {
    return Vec3{sigma * (p.y - p.x), p.x * (rho - p.z) - p.y, p.x * p.y - beta * p.z};
  };
  std::vector<Vec3> out{s};
  for (std::size_t k = 1; k < count; ++k) {
    const Vec3 k1 = f(s);
    const Vec3 k2 = f({s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y, s.z + 0.5 * h * k1.z});
    const Vec3 k3 = f({s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y, s.z + 0.5 * h * k2.z});
    const Vec3 k4 = f({s.x + h * k3.x, s.y + h * k3.y, s.z + h * k3.z});
    s = {s.x + h / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x), s.y + h / 6.0 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
         s.z + h / 6.0 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
    out.push_back(s);
  }
  return out;
}

// Bisection root of g on [lo, hi]; g(lo) and g(hi) must differ in sign.
template <class G>
double bisect(G g, double lo, double hi, int iterations = 200) {
  double glo = g(lo);
  for (int k = 0; k < iterations; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Kolmogorov-Smirnov statistic of a sample against a CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace oracle
