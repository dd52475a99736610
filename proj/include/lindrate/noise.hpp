#pragma once

// Increments of the driving processes over one step.

#include <cstdint>
#include <vector>

#include "lindrate/model.hpp"
#include "lindrate/montecarlo.hpp"

namespace lindrate {

struct StepNoise {
  std::vector<double> dW;           // W_alpha, alpha < d1
  std::vector<double> dW_coupling;  // W^k_alpha, index alpha * n + k, alpha < d2
  std::vector<int> dN;              // N_alpha, index alpha - d1
  std::vector<int> dN_coupling;     // N^k_alpha, index (alpha - d2) * n + k

  void resize(const RateModel& m);
  void clear();
  bool any_jump() const;
};

// Independent increments under the reference measure: W ~ Normal(0, dt) and
// at most one jump per channel with probability 1 - exp(-lambda dt).
void sample_reference_noise(const RateModel& m, double dt, RandomStream& rng, StepNoise& out);

struct NoisePath {
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::vector<StepNoise> steps;
};

NoisePath sample_noise_path(const RateModel& m, double dt, std::size_t steps, std::uint64_t seed,
                            std::uint64_t index);

struct JumpEvent {
  double time = 0.0;
  bool coupling = false;
  int channel = 0;  // index into diagonal or coupling
  int source = -1;  // source block k for coupling channels
};

}  // namespace lindrate
