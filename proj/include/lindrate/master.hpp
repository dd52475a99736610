#pragma once

// Deterministic propagation of the Lindblad rate equation.

#include <span>
#include <vector>

#include "lindrate/blockalg.hpp"
#include "lindrate/model.hpp"

namespace lindrate {

enum class EvolveMethod {
  rk4,       // classical fixed-step Runge-Kutta (default)
  adaptive,  // Dormand-Prince 5(4) with error control
  expm,      // dense matrix exponential of the vectorized generator
};

struct EvolveOptions {
  EvolveMethod method = EvolveMethod::rk4;
  double dt = 0.0;  // 0 selects default_step()
  double rtol = 1e-10;
  double atol = 1e-12;
  double min_step = 1e-12;
};

// Infinity norm of the vectorized rate generator, an upper bound on its
// spectral radius.
double max_rate(const RateModel& m);

// 1e-3 / max_rate(m).
double default_step(const RateModel& m);

// eta(t_k) for each grid point; the grid must be non-decreasing and >= 0.
// Throws NumericalError on step-size underflow in adaptive mode.
std::vector<BlockDensity> evolve(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                                 const EvolveOptions& options = {});

// T(t) = exp(t G) with G the vectorized rate generator.
class Propagator {
 public:
  explicit Propagator(const RateModel& m);

  int n() const { return n_; }
  int d() const { return d_; }
  const Matrix& generator() const { return generator_; }
  Matrix matrix(double t) const;
  BlockDensity apply(double t, const BlockDensity& tau) const;

 private:
  int n_;
  int d_;
  Matrix generator_;
};

class DegenerateNullSpace : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Unit-trace stationary state from the null space of the vectorized generator.
// Throws DegenerateNullSpace when the second-smallest singular value does not
// exceed 1e-8 times the largest.
BlockDensity equilibrium(const RateModel& m);

// Generator of the classical chain followed by the populations, over states
// ordered (block, level): index = block * d + level. Column c holds the rates
// out of state c; columns sum to zero. Throws std::invalid_argument when
// populations and coherences do not decouple.
RealMatrix classical_reduction(const RateModel& m);

}  // namespace lindrate
