#pragma once

// Two-level emitter in a structured bath with two energy bands: model
// construction, equilibrium closed forms, and the heterodyne spectrum.
//
// Blocks 0 and 1 are the bands; the system basis is (excited, ground).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lindrate/blockalg.hpp"
#include "lindrate/model.hpp"

namespace lindrate::twolevel {

struct TwoLevelParams {
  double omega1 = 1.0;
  double omega2 = 1.2;
  double gamma0 = 1.0;
  double gamma1 = 0.3;
  double gamma2 = 0.4;
  double kappa = 0.5;
  double epsilon = 1.0;  // detection efficiency
  double nu = 1.0;       // local oscillator frequency
  double k = 0.2;        // detector bandwidth
  // Reference intensities of the jump coupling processes N^1_1, N^2_1, N^1_2.
  double lambda11 = 0.3;
  double lambda21 = 0.4;
  double lambda12 = 0.5;

  // Sets the intensities to gamma1, gamma2 and gamma0 kappa.
  void reset_intensities();
  // Empty iff the parameters are admissible.
  std::vector<std::string> check() const;
};

// The reference parameter set, with nu = omega1.
TwoLevelParams reference_params();

// Throws ModelError on inadmissible parameters.
void require_valid(const TwoLevelParams& p);

// n = d = 2, H^i = omega_i sigma_z / 2, diffusive channels sqrt(gamma0 eps) sigma_-
// and sqrt(gamma0 (1 - eps)) sigma_- with phase e^{i nu t}, jump coupling
// channels (R^{21} = sqrt(gamma1) sigma_-, R^{12} = sqrt(gamma2) sigma_+) and
// R^{21} = sqrt(gamma0 kappa) I. Only W_1 is observed.
RateModel build_model(const TwoLevelParams& p);

struct SpectrumCoefficients {
  double p = 0.0;
  double z1_plus = 0.0;
  double z1_minus = 0.0;
  double z2_plus = 0.0;
  double z2_minus = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double Gamma1 = 0.0;
  double Gamma2 = 0.0;
  double w = 0.0;
  double D = 0.0;
};

SpectrumCoefficients coefficients(const TwoLevelParams& p);

struct Equilibrium {
  SpectrumCoefficients coefficients;
  BlockDensity eta;     // eta_1 = p (z1+ P+ + z1- P-), eta_2 = (1 - p)(z2+ P+ + z2- P-)
  Matrix system_state;  // p kappa P+ + (1 - p kappa) P-
};

Equilibrium equilibrium_closed_form(const TwoLevelParams& p);

// Sigma(nu) as a sum of two Lorentzians with dispersive interference terms.
double spectrum_form_a(const TwoLevelParams& p, double nu);
std::vector<double> spectrum_form_a(const TwoLevelParams& p, std::span<const double> nus);

// Sigma(nu) as a manifestly non-negative combination of Lorentzians.
double spectrum_form_b(const TwoLevelParams& p, double nu);
std::vector<double> spectrum_form_b(const TwoLevelParams& p, std::span<const double> nus);

// 1 + 4 pi eps Sigma(nu).
double power_limit(const TwoLevelParams& p, double nu);

// E[J(t)^2] by trapezoidal quadrature of the autocorrelation double integral
// over 0 <= r <= s <= t, starting from equilibrium, with the propagator
// exp(h G) applied repeatedly on a uniform grid of step at most h.
std::vector<double> power_quadrature(const TwoLevelParams& p, std::span<const double> nus, double t,
                                     double h = 0.05);

struct PowerEstimate {
  double nu = 0.0;
  double mean = 0.0;
  double se = 0.0;
};

struct PowerMcOptions {
  double t = 200.0;
  double dt = 0.01;
  std::size_t ntraj = 2000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
};

// E[J(t)^2] from the filtered output J <- e^{-k dt/2} J + sqrt(k) a dW_1 along
// nonlinear filter paths started at equilibrium, with a^2 = (1 - e^{-k dt}) / (k dt)
// so that the shot-noise part is exact. Trajectory i of frequency q uses
// stream (seed, q * ntraj + i).
std::vector<PowerEstimate> power_monte_carlo(const TwoLevelParams& p, std::span<const double> nus,
                                             const PowerMcOptions& options);

}  // namespace lindrate::twolevel
