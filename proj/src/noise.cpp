#include "lindrate/noise.hpp"

#include <algorithm>
#include <cmath>

namespace lindrate {

void StepNoise::resize(const RateModel& m) {
  dW.assign(static_cast<std::size_t>(m.d1), 0.0);
  dW_coupling.assign(static_cast<std::size_t>(m.d2 * m.n), 0.0);
  dN.assign(static_cast<std::size_t>(m.jump_diagonal_count()), 0);
  dN_coupling.assign(static_cast<std::size_t>(m.jump_coupling_count() * m.n), 0);
}

void StepNoise::clear() {
  std::fill(dW.begin(), dW.end(), 0.0);
  std::fill(dW_coupling.begin(), dW_coupling.end(), 0.0);
  std::fill(dN.begin(), dN.end(), 0);
  std::fill(dN_coupling.begin(), dN_coupling.end(), 0);
}

bool StepNoise::any_jump() const {
  return std::any_of(dN.begin(), dN.end(), [](int x) { return x != 0; }) ||
         std::any_of(dN_coupling.begin(), dN_coupling.end(), [](int x) { return x != 0; });
}

void sample_reference_noise(const RateModel& m, double dt, RandomStream& rng, StepNoise& out) {
  if (out.dW.size() != static_cast<std::size_t>(m.d1)) out.resize(m);
  const double sdt = std::sqrt(dt);
  for (auto& w : out.dW) w = sdt * rng.normal();
  for (auto& w : out.dW_coupling) w = sdt * rng.normal();
  for (int a = 0; a < m.jump_diagonal_count(); ++a) {
    const double lambda = m.diagonal[static_cast<std::size_t>(m.d1 + a)].intensity;
    out.dN[static_cast<std::size_t>(a)] = rng.bernoulli(-std::expm1(-lambda * dt)) ? 1 : 0;
  }
  for (int a = 0; a < m.jump_coupling_count(); ++a) {
    const auto& ch = m.coupling[static_cast<std::size_t>(m.d2 + a)];
    for (int k = 0; k < m.n; ++k) {
      const double lambda = ch.intensity[static_cast<std::size_t>(k)];
      // Zero-intensity processes are identically zero; no draw is consumed.
      out.dN_coupling[static_cast<std::size_t>(a * m.n + k)] =
          lambda > 0.0 && rng.bernoulli(-std::expm1(-lambda * dt)) ? 1 : 0;
    }
  }
}

NoisePath sample_noise_path(const RateModel& m, double dt, std::size_t steps, std::uint64_t seed,
                            std::uint64_t index) {
  NoisePath path;
  path.dt = dt;
  path.seed = seed;
  path.index = index;
  RandomStream rng(seed, index);
  path.steps.resize(steps);
  for (auto& s : path.steps) {
    s.resize(m);
    sample_reference_noise(m, dt, rng, s);
  }
  return path;
}

}  // namespace lindrate
