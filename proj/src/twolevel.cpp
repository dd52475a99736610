#include "lindrate/twolevel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "lindrate/montecarlo.hpp"
#include "lindrate/sme.hpp"

namespace lindrate::twolevel {

namespace {

constexpr double kPi = std::numbers::pi;

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

void TwoLevelParams::reset_intensities() {
  lambda11 = gamma1;
  lambda21 = gamma2;
  lambda12 = gamma0 * kappa;
}

std::vector<std::string> TwoLevelParams::check() const {
  std::vector<std::string> out;
  auto need = [&](bool ok, const char* what) {
    if (!ok) out.emplace_back(what);
  };
  need(positive(omega1), "omega1 must be positive");
  need(positive(omega2), "omega2 must be positive");
  need(positive(gamma0), "gamma0 must be positive");
  need(positive(gamma1), "gamma1 must be positive");
  need(positive(gamma2), "gamma2 must be positive");
  need(kappa >= 0.0 && std::isfinite(kappa), "kappa must be non-negative");
  need(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  need(std::isfinite(nu), "nu must be finite");
  need(positive(k), "k must be positive");
  need(positive(lambda11), "lambda11 must be positive");
  need(positive(lambda21), "lambda21 must be positive");
  if (kappa > 0.0)
    need(positive(lambda12), "lambda12 must be positive");
  else
    need(lambda12 >= 0.0 && std::isfinite(lambda12), "lambda12 must be non-negative");
  return out;
}

TwoLevelParams reference_params() { return TwoLevelParams{}; }

void require_valid(const TwoLevelParams& p) {
  const auto problems = p.check();
  if (problems.empty()) return;
  std::vector<Diagnostic> diags;
  for (const auto& s : problems) diags.push_back({"twolevel", s});
  throw ModelError(std::move(diags));
}

RateModel build_model(const TwoLevelParams& p) {
  require_valid(p);
  const Matrix sm = ops::sigma_minus();
  const Matrix sp = ops::sigma_plus();
  RateModel m;
  m.n = 2;
  m.d = 2;
  m.hamiltonian = BlockOperator({0.5 * p.omega1 * ops::sigma_z(), 0.5 * p.omega2 * ops::sigma_z()});

  const PhaseFunction phase = heterodyne_phase(p.nu);
  auto emission = [&](const char* name, double weight) {
    DiagonalChannel ch;
    ch.name = name;
    ch.base = BlockOperator::uniform(2, std::sqrt(weight) * sm);
    ch.phase = {phase, phase};
    return ch;
  };
  m.diagonal.push_back(emission("emission_detected", p.gamma0 * p.epsilon));
  m.diagonal.push_back(emission("emission_lost", p.gamma0 * (1.0 - p.epsilon)));
  m.d1 = 2;

  CouplingChannel transfer;
  transfer.name = "band_transfer";
  transfer.op = CouplingOperator(2, 2);
  transfer.op(1, 0) = std::sqrt(p.gamma1) * sm;
  transfer.op(0, 1) = std::sqrt(p.gamma2) * sp;
  transfer.intensity = {p.lambda11, p.lambda21};

  CouplingChannel excitation;
  excitation.name = "thermal_excitation";
  excitation.op = CouplingOperator(2, 2);
  excitation.op(1, 0) = std::sqrt(p.gamma0 * p.kappa) * ops::identity(2);
  excitation.intensity = {p.lambda12, 0.0};

  m.coupling = {transfer, excitation};
  m.d2 = 0;
  m.observed = {1, m.d1, m.d2};
  lindrate::require_valid(m);
  return m;
}

SpectrumCoefficients coefficients(const TwoLevelParams& p) {
  const double g0 = p.gamma0, g1 = p.gamma1, g2 = p.gamma2, kap = p.kappa;
  SpectrumCoefficients c;
  c.kappa1 = kap;
  c.kappa2 = g2 * kap / (g1 + g0 * (1.0 + kap));
  c.z1_plus = c.kappa1 / (1.0 + c.kappa1);
  c.z2_plus = c.kappa2 / (1.0 + c.kappa2);
  c.z1_minus = 1.0 - c.z1_plus;
  c.z2_minus = 1.0 - c.z2_plus;
  c.p = g2 * (1.0 + kap) / (g2 + kap * (g0 + g2 + g1) + kap * kap * (g0 + g2));
  c.Gamma1 = g0 + g1 + 2.0 * g0 * kap + p.k;
  c.Gamma2 = g0 + g2 + p.k;
  const double delta = g2 - g1 - 2.0 * g0 * kap;
  const double dw = p.omega1 - p.omega2;
  c.w = 2.0 * g0 * kap / (4.0 * dw * dw + delta * delta);
  c.D = (2.0 / kPi) / (1.0 + kap * g1 / g2 + kap * (1.0 + kap) * (1.0 + g0 / g2));
  return c;
}

Equilibrium equilibrium_closed_form(const TwoLevelParams& p) {
  require_valid(p);
  Equilibrium e;
  e.coefficients = coefficients(p);
  const auto& c = e.coefficients;
  const Matrix Pp = ops::projector_excited();
  const Matrix Pm = ops::projector_ground();
  e.eta = BlockDensity({c.p * (c.z1_plus * Pp + c.z1_minus * Pm),
                        (1.0 - c.p) * (c.z2_plus * Pp + c.z2_minus * Pm)});
  e.system_state = (c.p * p.kappa) * Pp + (1.0 - c.p * p.kappa) * Pm;
  return e;
}

double spectrum_form_a(const TwoLevelParams& p, double nu) {
  const SpectrumCoefficients c = coefficients(p);
  const double delta = p.gamma2 - p.gamma1 - 2.0 * p.gamma0 * p.kappa;
  const double dw = p.omega2 - p.omega1;
  const double x1 = nu - p.omega1;
  const double x2 = nu - p.omega2;
  const double first = ((1.0 - c.p) * c.z2_plus * c.Gamma2 - c.p * c.z1_plus * c.w * (c.Gamma2 * delta + 4.0 * dw * x2)) /
                       (kPi * (4.0 * x2 * x2 + c.Gamma2 * c.Gamma2));
  const double second = c.p * c.z1_plus * ((1.0 + c.w * delta) * c.Gamma1 + 4.0 * c.w * dw * x1) /
                        (kPi * (4.0 * x1 * x1 + c.Gamma1 * c.Gamma1));
  return 2.0 * p.gamma0 * (first + second);
}

double spectrum_form_b(const TwoLevelParams& p, double nu) {
  const SpectrumCoefficients c = coefficients(p);
  const double x1 = nu - p.omega1;
  const double x2 = nu - p.omega2;
  const double A1 = 4.0 * x1 * x1 + c.Gamma1 * c.Gamma1;
  const double A2 = 4.0 * x2 * x2 + c.Gamma2 * c.Gamma2;
  const double dw = p.omega1 - p.omega2;
  const double G = c.Gamma1 + c.Gamma2;
  const double kap = p.kappa;
  return c.D * p.gamma0 * kap *
         ((p.gamma0 * (1.0 + kap) + p.gamma1 + p.k) / A1 + kap * (p.gamma2 + p.k) / A2 +
          p.gamma0 * kap * (G * G + 4.0 * dw * dw) / (A1 * A2));
}

std::vector<double> spectrum_form_a(const TwoLevelParams& p, std::span<const double> nus) {
  std::vector<double> out;
  out.reserve(nus.size());
  for (double nu : nus) out.push_back(spectrum_form_a(p, nu));
  return out;
}

std::vector<double> spectrum_form_b(const TwoLevelParams& p, std::span<const double> nus) {
  std::vector<double> out;
  out.reserve(nus.size());
  for (double nu : nus) out.push_back(spectrum_form_b(p, nu));
  return out;
}

double power_limit(const TwoLevelParams& p, double nu) {
  return 1.0 + 4.0 * kPi * p.epsilon * spectrum_form_a(p, nu);
}

std::vector<double> power_quadrature(const TwoLevelParams& p, std::span<const double> nus, double t, double h) {
  require_valid(p);
  if (!(t >= 0.0) || !(h > 0.0)) throw std::invalid_argument("power_quadrature: need t >= 0 and h > 0");
  const RateModel m = build_model(p);
  const Equilibrium eq = equilibrium_closed_form(p);
  const Matrix sm = ops::sigma_minus();
  const Matrix sp = ops::sigma_plus();
  const auto M = static_cast<std::size_t>(std::max(1.0, std::ceil(t / h - 1e-9)));
  const double step = t / static_cast<double>(M);

  // c1(tau) = sum_i Tr sigma_- [T(tau)(sigma_- eta)]_i, c2 likewise for eta sigma_+.
  const Matrix P = (step * vectorized_rate_generator(m)).exp();
  BlockDensity x1(2, 2), x2(2, 2);
  for (int j = 0; j < 2; ++j) {
    x1[j] = sm * eq.eta[j];
    x2[j] = eq.eta[j] * sp;
  }
  Vector v1 = x1.vectorize();
  Vector v2 = x2.vectorize();
  auto observe = [&](const Vector& v) {
    const BlockDensity y = BlockDensity::unvectorize(v, 2, 2);
    return (sm * y[0]).trace() + (sm * y[1]).trace();
  };
  std::vector<cplx> c1(M + 1), c2(M + 1);
  for (std::size_t q = 0; q <= M; ++q) {
    c1[q] = observe(v1);
    c2[q] = observe(v2);
    v1 = (P * v1).eval();
    v2 = (P * v2).eval();
  }

  std::vector<double> damp(M + 1);
  for (std::size_t q = 0; q <= M; ++q) damp[q] = std::exp(-0.5 * p.k * (t - static_cast<double>(q) * step));
  std::vector<double> out;
  out.reserve(nus.size());
  std::vector<cplx> phase(M + 1);
  for (double nu : nus) {
    for (std::size_t q = 0; q <= M; ++q) phase[q] = std::exp(kI * (nu * static_cast<double>(q) * step));
    double total = 0.0;
    for (std::size_t i = 1; i <= M; ++i) {
      cplx inner = 0.0;
      for (std::size_t j = 0; j <= i; ++j) {
        const double wj = (j == 0 || j == i) ? 0.5 : 1.0;
        const cplx f = phase[j] * c1[i - j] + std::conj(phase[j]) * c2[i - j];
        inner += (wj * damp[j]) * f;
      }
      const double wi = (i == M) ? 0.5 : 1.0;
      total += wi * damp[i] * 2.0 * (phase[i] * inner).real();
    }
    total *= step * step;
    out.push_back(-std::expm1(-p.k * t) + 2.0 * p.k * p.gamma0 * p.epsilon * total);
  }
  return out;
}

std::vector<PowerEstimate> power_monte_carlo(const TwoLevelParams& p, std::span<const double> nus,
                                             const PowerMcOptions& options) {
  require_valid(p);
  if (options.ntraj < 2) throw std::invalid_argument("power_monte_carlo: need at least two trajectories");
  if (!(options.t > 0.0) || !(options.dt > 0.0)) throw std::invalid_argument("power_monte_carlo: need t > 0 and dt > 0");
  const Equilibrium eq = equilibrium_closed_form(p);
  std::vector<PowerEstimate> out;
  for (std::size_t q = 0; q < nus.size(); ++q) {
    TwoLevelParams pq = p;
    pq.nu = nus[q];
    const RateModel m = build_model(pq);
    double h = 0.0;
    const double grid[] = {options.t};
    const std::size_t steps = grid_steps(grid, options.dt, h).front();
    const double decay = std::exp(-0.5 * p.k * h);
    const double gain = std::sqrt(p.k) * std::sqrt(-std::expm1(-p.k * h) / (p.k * h));
    const double sdt = std::sqrt(h);
    auto samples = run_indexed(options.ntraj, options.workers, [&](std::size_t i) {
      RandomStream rng(options.seed, q * options.ntraj + i);
      const NonlinearSmeStepper stepper(m, h);
      BlockDensity rho = eq.eta;
      ObservedIncrements innovation;
      innovation.resize(m);
      double J = 0.0;
      for (std::size_t s = 0; s < steps; ++s) {
        const double ts = static_cast<double>(s) * h;
        const FilterSignals f = compute_filter_signals(m, rho, ts);
        innovation.dW[0] = sdt * rng.normal();
        const double dW = innovation.dW[0] + f.m[0] * h;
        stepper.step(rho, ts, innovation, f);
        J = decay * J + gain * dW;
      }
      Eigen::VectorXd x(1);
      x[0] = J * J;
      return x;
    });
    const SampleStats stats = sample_stats(samples);
    out.push_back({nus[q], stats.mean[0], stats.standard_error()[0]});
  }
  return out;
}

}  // namespace lindrate::twolevel
