#include "kdetrack/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kdetrack/errors.hpp"

namespace kdetrack {

void LoiterSpec::validate() const {
  const std::size_t n = loiter_points.size();
  if (n < 2) throw ConfigError("LoiterSpec: need at least 2 loiter points");
  for (const auto& p : loiter_points) {
    if (p.dim() != 2) throw ConfigError("LoiterSpec: loiter points must be planar");
    if (!p.is_finite()) throw ConfigError("LoiterSpec: non-finite loiter point");
  }
  if (transition.size() != n) throw ConfigError("LoiterSpec: transition must be " + std::to_string(n) + " rows");
  for (std::size_t r = 0; r < n; ++r) {
    if (transition[r].size() != n) throw ConfigError("LoiterSpec: transition row " + std::to_string(r) + " has wrong length");
    double sum = 0.0;
    for (double p : transition[r]) {
      if (!(p >= 0.0)) throw ConfigError("LoiterSpec: negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("LoiterSpec: transition row " + std::to_string(r) + " does not sum to 1");
    if (transition[r][r] > 0.0) throw ConfigError("LoiterSpec: self transitions are not supported");
  }
  if (dwell_steps.size() != 1 && dwell_steps.size() != n) throw ConfigError("LoiterSpec: dwell_steps needs 1 or n entries");
  if (!(speed > 0.0)) throw ConfigError("LoiterSpec: speed must be > 0");
  if (!(step_dt > 0.0)) throw ConfigError("LoiterSpec: step_dt must be > 0");
  if (!(noise_sigma >= 0.0)) throw ConfigError("LoiterSpec: noise_sigma must be >= 0");
  if (steps == 0) throw ConfigError("LoiterSpec: steps must be >= 1");
  if (start >= n) throw ConfigError("LoiterSpec: start index out of range");

  // Irreducibility: every state reaches every other, so no state is transient.
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (transition[u][v] > 0.0 && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw ConfigError("LoiterSpec: chain is not irreducible (transient states present)");
    }
  }
}

LoiterSpec LoiterSpec::default_six() {
  LoiterSpec spec;
  spec.loiter_points = {{8.0, 8.0}, {1.0, 5.0}, {1.0, 1.0}, {3.0, 1.0}, {8.0, 2.0}, {9.0, 5.0}};
  spec.transition = {
      {0, 1, 0, 0, 0, 0},      //
      {0, 0, 0.5, 0.5, 0, 0},  // fork
      {0, 0, 0, 0, 1, 0},      //
      {0, 0, 0, 0, 1, 0},      //
      {0, 0, 0, 0, 0, 1},      //
      {1, 0, 0, 0, 0, 0},      //
  };
  spec.dwell_steps = {4};
  return spec;
}

LoiterSpec LoiterSpec::default_five() {
  LoiterSpec spec;
  spec.loiter_points = {{2.0, 8.0}, {8.0, 6.0}, {7.0, 1.0}, {3.0, 2.0}, {1.0, 5.0}};
  spec.transition = {
      {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}, {1, 0, 0, 0, 0},
  };
  spec.dwell_steps = {4};
  return spec;
}

namespace {

std::size_t next_loiter(const std::vector<double>& row, Rng& rng) {
  std::discrete_distribution<std::size_t> choose(row.begin(), row.end());
  return choose(rng);
}

Point add_noise(const Point& p, double sigma, Rng& rng) {
  if (sigma == 0.0) return p;
  std::normal_distribution<double> noise(0.0, sigma);
  Point out = p;
  for (double& c : out) c += noise(rng);
  return out;
}

}  // namespace

SyntheticRun generate_loiter(const LoiterSpec& spec, Rng& rng) {
  spec.validate();
  auto dwell_of = [&](std::size_t k) {
    return static_cast<double>(spec.dwell_steps.size() == 1 ? spec.dwell_steps[0] : spec.dwell_steps[k]) *
           spec.step_dt;
  };

  // Current leg: dwell at `from` until leg_start + dwell, then travel to `to`.
  std::size_t from = spec.start;
  std::size_t to = next_loiter(spec.transition[from], rng);
  double leg_start = 0.0;
  auto leg_length = [&] { return euclidean(spec.loiter_points[from].coords(), spec.loiter_points[to].coords()); };
  double leg_end = dwell_of(from) + leg_length() / spec.speed;

  SyntheticRun run;
  run.visits = {from};
  std::vector<Observation> clean;
  std::vector<Observation> noisy;
  clean.reserve(spec.steps);
  noisy.reserve(spec.steps);
  for (std::size_t k = 0; k < spec.steps; ++k) {
    const double t = static_cast<double>(k) * spec.step_dt;
    while (t >= leg_end) {
      from = to;
      run.visits.push_back(from);
      to = next_loiter(spec.transition[from], rng);
      leg_start = leg_end;
      leg_end = leg_start + dwell_of(from) + leg_length() / spec.speed;
    }
    const Point& a = spec.loiter_points[from];
    const Point& b = spec.loiter_points[to];
    const double moving = t - leg_start - dwell_of(from);
    Point p = a;
    if (moving > 0.0) {
      const double s = std::min(1.0, moving * spec.speed / leg_length());
      for (std::size_t j = 0; j < 2; ++j) p[j] += s * (b[j] - a[j]);
    }
    noisy.push_back({t, add_noise(p, spec.noise_sigma, rng)});
    clean.push_back({t, std::move(p)});
  }
  run.clean = Trajectory(std::move(clean));
  run.noisy = Trajectory(std::move(noisy));
  return run;
}

void LorenzSpec::validate() const {
  if (x0.dim() != 3 || !x0.is_finite()) throw ConfigError("LorenzSpec: x0 must be a finite 3-d point");
  if (!(dt > 0.0)) throw ConfigError("LorenzSpec: dt must be > 0");
  if (steps < 1) throw ConfigError("LorenzSpec: steps must be >= 1");
  if (!(noise_sigma >= 0.0)) throw ConfigError("LorenzSpec: noise_sigma must be >= 0");
  if (!std::isfinite(sigma) || !std::isfinite(rho) || !std::isfinite(beta)) {
    throw ConfigError("LorenzSpec: parameters must be finite");
  }
}

namespace {

struct Vec3 {
  double x, y, z;
};

Vec3 lorenz_rhs(const LorenzSpec& s, const Vec3& p) {
  return {s.sigma * (p.y - p.x), p.x * (s.rho - p.z) - p.y, p.x * p.y - s.beta * p.z};
}

Vec3 axpy(const Vec3& p, double a, const Vec3& k) { return {p.x + a * k.x, p.y + a * k.y, p.z + a * k.z}; }

}  // namespace

SyntheticRun generate_lorenz(const LorenzSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<Observation> clean;
  std::vector<Observation> noisy;
  clean.reserve(spec.steps);
  noisy.reserve(spec.steps);
  Vec3 state{spec.x0[0], spec.x0[1], spec.x0[2]};
  const double h = spec.dt;
  for (std::size_t k = 0; k < spec.steps; ++k) {
    const double t = static_cast<double>(k) * h;
    Point p{state.x, state.y, state.z};
    noisy.push_back({t, add_noise(p, spec.noise_sigma, rng)});
    clean.push_back({t, std::move(p)});
    const Vec3 k1 = lorenz_rhs(spec, state);
    const Vec3 k2 = lorenz_rhs(spec, axpy(state, h / 2.0, k1));
    const Vec3 k3 = lorenz_rhs(spec, axpy(state, h / 2.0, k2));
    const Vec3 k4 = lorenz_rhs(spec, axpy(state, h, k3));
    state.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    state.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    state.z += h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
  }
  SyntheticRun run;
  run.clean = Trajectory(std::move(clean));
  run.noisy = Trajectory(std::move(noisy));
  return run;
}

Trajectory downsample_with_interpolation(const Trajectory& traj, double period) {
  if (!(period > 0.0)) throw ConfigError("downsample: period must be > 0");
  if (traj.size() < 2) throw DataError("downsample: need at least 2 samples");
  traj.require_strictly_increasing();
  const double t0 = traj.front().t;
  const double span = traj.back().t - t0;
  if (period > span) throw DataError("downsample: period exceeds the trajectory span");
  const auto count = static_cast<std::size_t>(std::floor(span / period + 1e-9));
  std::vector<Observation> out;
  out.reserve(count + 1);
  for (std::size_t k = 0; k <= count; ++k) {
    const double t = std::min(t0 + static_cast<double>(k) * period, traj.back().t);
    out.push_back({t, *traj.position_at(t)});
  }
  return Trajectory(std::move(out));
}

}  // namespace kdetrack
