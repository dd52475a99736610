#pragma once

// Linear stochastic Schroedinger equation under the reference measure Q, its
// density p(t) = |zeta(t)|^2 and the weighted unravelling of the rate equation.

#include <span>
#include <vector>

#include "lindrate/blockalg.hpp"
#include "lindrate/model.hpp"
#include "lindrate/montecarlo.hpp"
#include "lindrate/noise.hpp"

namespace lindrate {

// v, I quantities evaluated at a normalized state psi(t-).
struct Signals {
  std::vector<double> v;           // v_alpha, alpha < d1
  std::vector<double> v_coupling;  // v^k_alpha, index alpha * n + k, alpha < d2
  std::vector<double> I;           // I_beta, index beta - d1
  std::vector<double> I_coupling;  // I^k_beta, index (beta - d2) * n + k
};

Signals compute_signals(const RateModel& m, const BlockVector& psi, double t);
void compute_signals(const RateModel& m, const BlockVector& psi, double t, Signals& out);

// zeta / |zeta|, or every block equal to e_1 / sqrt(n) when zeta = 0.
BlockVector normalized_state(const BlockVector& zeta);

// One Euler step of the linear equation over [t, t + dt). When a jump fires
// the state is replaced by the jump map applied to zeta(t-), sequentially in
// channel order if several fire; the continuous part of that step is dropped.
class LinearStepper {
 public:
  LinearStepper(const RateModel& m, double dt);
  void step(BlockVector& zeta, double t, const StepNoise& noise) const;
  // Applies the jumps recorded in `noise`; returns the number applied.
  int apply_jumps(BlockVector& zeta, double t, const StepNoise& noise) const;

 private:
  const RateModel* m_;
  double dt_;
  std::vector<Matrix> drift_;  // I + dt (K^j + lambda / 2)
  mutable BlockVector work_;
};

BlockVector step_linear(const RateModel& m, const BlockVector& zeta, double t, double dt, const StepNoise& noise);

struct LinearTrajectory {
  std::vector<double> time;       // t_0 = 0, ..., t_K
  std::vector<double> p;          // |zeta(t_k)|^2 at every time
  std::vector<BlockVector> zeta;  // every time when retained, otherwise only the last
  std::vector<JumpEvent> jumps;
  // Step k covers [t_k, t_{k+1}); retained paths only.
  std::vector<StepNoise> noise;
  std::vector<Signals> signals;  // at psi(t_k)
};

LinearTrajectory simulate_linear(const RateModel& m, const BlockVector& zeta0, double t, double dt,
                                 RandomStream& rng, bool retain_path = true);

// Closed-form density along a retained trajectory: exponential of the
// diffusive stochastic integrals and the compensators times the product over
// jumps of I / lambda, all from the stored signals. Returns a value per time.
std::vector<double> doleans_density(const RateModel& m, const LinearTrajectory& traj);

// Draws zeta_0 with E[|zeta_0><zeta_0|] = eta(0). From a BlockDensity the
// blocks are eigendecomposed and an eigenvector is chosen with probability
// equal to its eigenvalue; a rank-one input is returned without a draw.
class InitialSampler {
 public:
  explicit InitialSampler(const BlockDensity& eta0);
  InitialSampler(std::vector<BlockVector> states, std::vector<double> weights);

  BlockVector sample(RandomStream& rng) const;
  bool deterministic() const { return states_.size() == 1; }
  const std::vector<BlockVector>& states() const { return states_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<BlockVector> states_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

struct UnravelPoint {
  double time = 0.0;
  BlockEstimate state;
  double p_mean = 1.0;
  double p_se = 0.0;
};

struct UnravelResult {
  double dt = 0.0;
  std::size_t ntraj = 0;
  std::vector<UnravelPoint> points;
};

// Steps used to reach each grid time with a uniform step no larger than dt
// that lands on the final time. Throws if a grid time is off the lattice.
std::vector<std::size_t> grid_steps(std::span<const double> grid, double dt, double& dt_used);

// Monte Carlo mean of outer_blocks(zeta(t)) under Q at each grid time, with
// the mean of p(t).
UnravelResult unravel_weighted(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                               const McOptions& options);
UnravelPoint unravel_weighted(const RateModel& m, const BlockDensity& eta0, double t, const McOptions& options);

}  // namespace lindrate
