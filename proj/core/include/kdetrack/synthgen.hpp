#pragma once

#include <cstddef>
#include <vector>

#include "kdetrack/point.hpp"
#include "kdetrack/random.hpp"
#include "kdetrack/trajectory.hpp"

namespace kdetrack {

// Particle hopping between planar loiter points: it dwells at each, then picks
// the next loiter from `transition` and travels there in a straight line.
struct LoiterSpec {
  std::vector<Point> loiter_points;
  std::vector<std::vector<double>> transition;  // row-stochastic
  std::vector<std::size_t> dwell_steps;         // one entry per loiter, or one shared entry
  double speed = 1.0;
  double step_dt = 0.5;
  double noise_sigma = 0.05;
  std::size_t steps = 10000;
  std::size_t start = 0;

  // Checks shapes, row sums, positivity and that every loiter is reachable from every other.
  void validate() const;

  // Six loiters in [0,10]^2 with a fair fork at (1,5) toward (1,1) or (3,1).
  static LoiterSpec default_six();
  // Five loiters on a single loop.
  static LoiterSpec default_five();
};

struct SyntheticRun {
  Trajectory noisy;
  Trajectory clean;
  // Loiter indices in visiting order, starting with spec.start.
  std::vector<std::size_t> visits;
};

SyntheticRun generate_loiter(const LoiterSpec& spec, Rng& rng);

struct LorenzSpec {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
  Point x0{1.0, 1.0, 1.0};
  double dt = 0.01;
  std::size_t steps = 30000;  // number of emitted points, x0 included
  double noise_sigma = 1.0;

  void validate() const;
};

// Fixed-step classical RK4 with i.i.d. Gaussian observation noise on the noisy copy.
SyntheticRun generate_lorenz(const LorenzSpec& spec, Rng& rng);

// Positions at t_0 + k * period by linear interpolation between bracketing samples.
Trajectory downsample_with_interpolation(const Trajectory& traj, double period);

}  // namespace kdetrack
