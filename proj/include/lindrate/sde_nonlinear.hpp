#pragma once

// Normalized stochastic Schroedinger equation under the physical measure:
// Girsanov-shifted Wiener noises and state-dependent jump intensities.

#include <span>
#include <vector>

#include "lindrate/blockalg.hpp"
#include "lindrate/model.hpp"
#include "lindrate/montecarlo.hpp"
#include "lindrate/noise.hpp"
#include "lindrate/sde_linear.hpp"

namespace lindrate {

// Draws for one physical step: innovation increments dW-hat ~ Normal(0, dt)
// and one uniform per jump process, laid out like StepNoise.
struct PhysicalDraws {
  std::vector<double> dW;
  std::vector<double> dW_coupling;
  std::vector<double> u;           // index beta - d1
  std::vector<double> u_coupling;  // index (beta - d2) * n + k

  void resize(const RateModel& m);
  void sample(double dt, RandomStream& rng);
};

struct PhysicalStep {
  Signals signals;  // at psi(t-)
  // Output increments: dW = dW-hat + v dt for the diffusive channels and the
  // realized jump indicators.
  StepNoise output;
  std::vector<JumpEvent> jumps;
};

// One Euler step over [t, t + dt). Each jump process fires with probability
// 1 - exp(-I dt) from its intensity at psi(t-); if one fires, psi is replaced
// by the normalized jump image of psi(t-) (the first firing channel in order;
// simultaneous firings have probability O(dt^2)). Otherwise the drift and
// diffusion terms are applied. The result is renormalized. Throws
// NumericalError if a jump fires while its intensity is below 1e-14.
class PhysicalStepper {
 public:
  PhysicalStepper(const RateModel& m, double dt);
  void step(BlockVector& psi, double t, const PhysicalDraws& draws, PhysicalStep& info) const;

 private:
  const RateModel* m_;
  double dt_;
  AssembledGenerators g_;
  mutable BlockVector work_;
};

BlockVector step_physical(const RateModel& m, const BlockVector& psi, double t, double dt,
                          const PhysicalDraws& draws, PhysicalStep* info = nullptr);

struct PhysicalTrajectory {
  std::vector<double> time;
  std::vector<BlockVector> psi;  // every time when retained, otherwise only the last
  std::vector<Signals> signals;  // per step, at psi(t_k); retained paths only
  std::vector<StepNoise> output;  // per step output increments; retained paths only
  std::vector<JumpEvent> jumps;
  std::vector<double> W;              // reconstructed W_alpha(t) at the final time
  std::vector<int> counts;            // N_beta(t), index beta - d1
  std::vector<int> counts_coupling;   // N^k_beta(t), index (beta - d2) * n + k
};

PhysicalTrajectory simulate_physical(const RateModel& m, const BlockVector& psi0, double t, double dt,
                                     RandomStream& rng, bool retain_path = true);

// Unweighted mean of outer_blocks(psi(t)) over physical trajectories.
UnravelResult unravel_normalized(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                                 const McOptions& options);
UnravelPoint unravel_normalized(const RateModel& m, const BlockDensity& eta0, double t, const McOptions& options);

}  // namespace lindrate
