#include <doctest.h>

#include <cmath>
#include <vector>

#include "lindrate/master.hpp"
#include "lindrate/sde_nonlinear.hpp"
#include "lindrate/twolevel.hpp"
#include "oracles.hpp"

using namespace lindrate;

namespace {

constexpr std::size_t kTransferFromOne = 0;
constexpr std::size_t kExcitationFromOne = 2;

Vector ket(cplx a, cplx b) {
  Vector v(2);
  v << a, b;
  return v;
}

BlockVector state(const Vector& one, const Vector& two) {
  BlockVector z(2, 2);
  z[0] = one;
  z[1] = two;
  z *= 1.0 / z.norm();
  return z;
}

PhysicalDraws quiet(const RateModel& m) {
  PhysicalDraws d;
  d.resize(m);
  return d;
}

// Trapezoid of f over [0, t] on the grid of `etas`.
template <class F>
double integrate(const std::vector<double>& grid, const std::vector<BlockDensity>& etas, F f) {
  double s = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k)
    s += 0.5 * (grid[k] - grid[k - 1]) * (f(grid[k - 1], etas[k - 1]) + f(grid[k], etas[k]));
  return s;
}

}  // namespace

TEST_CASE("the excitation jump carries the normalized block one into block two") {
  const RateModel m = twolevel::build_model(twolevel::reference_params());
  PhysicalDraws d = quiet(m);
  d.u_coupling[kExcitationFromOne] = 0.0;
  const BlockVector psi = state(ket(cplx(0.3, 0.2), 0.4), ket(0.5, cplx(0, 0.1)));
  PhysicalStep info;
  const BlockVector out = step_physical(m, psi, 0.0, 1e-3, d, &info);
  CHECK(out[0].norm() == 0.0);
  CHECK((out[1] - psi[0] / psi[0].norm()).norm() < 1e-14);
  REQUIRE(info.jumps.size() == 1);
  CHECK(info.jumps[0].coupling);
  CHECK(info.jumps[0].channel == 1);
  CHECK(info.jumps[0].source == 0);
  CHECK(info.output.dN_coupling[kExcitationFromOne] == 1);
}

TEST_CASE("only the first firing jump is applied") {
  const RateModel m = twolevel::build_model(twolevel::reference_params());
  PhysicalDraws d = quiet(m);
  d.u_coupling[kTransferFromOne] = 0.0;
  d.u_coupling[kExcitationFromOne] = 0.0;
  const BlockVector psi = state(ket(0.6, 0.8), ket(0, 0));
  PhysicalStep info;
  const BlockVector out = step_physical(m, psi, 0.0, 1e-3, d, &info);
  CHECK(info.jumps.size() == 1);
  CHECK(out[0].norm() == 0.0);
  CHECK((out[1] - ket(0, 1)).norm() < 1e-14);  // sigma_- of the excited component
}

TEST_CASE("a jump at vanishing intensity is an error") {
  const RateModel m = twolevel::build_model(twolevel::reference_params());
  PhysicalDraws d = quiet(m);
  d.u_coupling[kExcitationFromOne] = 0.0;
  const BlockVector psi = state(ket(1e-8, 0), ket(1, 0));
  CHECK_THROWS_AS(step_physical(m, psi, 0.0, 1e-3, d), NumericalError);

  // Exactly zero intensity never fires, even with a zero uniform.
  PhysicalDraws z = quiet(m);
  z.u_coupling[3] = 0.0;
  PhysicalStep info;
  step_physical(m, psi, 0.0, 1e-3, z, &info);
  CHECK(info.jumps.empty());
}

TEST_CASE("Hamiltonian-only steps are the normalized Euler map") {
  oracle::Gen g(81);
  RateModel m = g.model(2, 3);
  m.diagonal.clear();
  m.coupling.clear();
  m.d1 = m.d2 = 0;
  m.observed = {};
  BlockVector psi = g.block_vector(2, 3);
  psi *= 1.0 / psi.norm();
  const double dt = 1e-3;
  const BlockVector out = step_physical(m, psi, 0.0, dt, quiet(m));
  BlockVector raw(2, 3);
  for (int j = 0; j < 2; ++j) raw[j] = psi[j] - kI * dt * (m.hamiltonian[j] * psi[j]);
  CHECK(std::abs(raw.norm() - 1.0) < 10.0 * dt * dt);
  raw *= 1.0 / raw.norm();
  for (int j = 0; j < 2; ++j) CHECK((out[j] - raw[j]).norm() < 1e-14);
}

TEST_CASE("stored signals can be recomputed from the path") {
  const auto p = twolevel::reference_params();
  const RateModel m = twolevel::build_model(p);
  RandomStream rng(82, 0);
  const PhysicalTrajectory traj = simulate_physical(m, state(ket(1, 1), ket(0, 1)), 2.0, 1e-3, rng);
  REQUIRE(traj.signals.size() + 1 == traj.psi.size());
  const Matrix sm = ops::sigma_minus(), sp = ops::sigma_plus();
  for (std::size_t k = 0; k < traj.signals.size(); ++k) {
    const BlockVector& psi = traj.psi[k];
    const double t = traj.time[k];
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
    const Signals& s = traj.signals[k];
    double v = 0.0;
    for (int j = 0; j < 2; ++j) v += 2.0 * (std::exp(kI * p.nu * t) * psi[j].dot(sm * psi[j])).real();
    CHECK(std::abs(s.v[0] - std::sqrt(p.gamma0 * p.epsilon) * v) < 1e-12);
    CHECK(std::abs(s.I_coupling[kTransferFromOne] - p.gamma1 * (sm * psi[0]).squaredNorm()) < 1e-12);
    CHECK(std::abs(s.I_coupling[1] - p.gamma2 * (sp * psi[1]).squaredNorm()) < 1e-12);
    CHECK(std::abs(s.I_coupling[kExcitationFromOne] - p.kappa * p.gamma0 * psi[0].squaredNorm()) < 1e-12);
  }
}

TEST_CASE("normalized and weighted unravellings have the same law") {
  const auto p = twolevel::reference_params();
  const RateModel m = twolevel::build_model(p);
  BlockDensity eta0(2, 2);
  eta0[0] = 0.5 * ops::identity(2);
  McOptions o;
  o.dt = 1e-2;
  o.ntraj = 2000;
  o.seed = 83;
  const std::vector<double> grid{1.0, 2.0};
  const UnravelResult a = unravel_normalized(m, eta0, grid, o);
  const UnravelResult b = unravel_weighted(m, eta0, grid, o);
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (int i = 0; i < 2; ++i) {
      const auto& pa = a.points[g].state;
      const auto& pb = b.points[g].state;
      const double s = std::hypot(pa.sigma[static_cast<std::size_t>(i)], pb.sigma[static_cast<std::size_t>(i)]);
      CHECK(trace_norm(pa.mean[i] - pb.mean[i]) <= 3.0 * s);
    }
}

TEST_CASE("jump counts and diffusive outputs follow their compensators") {
  const auto p = twolevel::reference_params();
  const RateModel m = twolevel::build_model(p);
  const BlockVector psi0 = state(ket(1, 1), ket(0, 0));
  const double t = 2.0, dt = 1e-2;
  const std::size_t ntraj = 3000;

  auto samples = run_indexed(ntraj, 0, [&](std::size_t i) {
    RandomStream rng(84, i);
    const PhysicalTrajectory traj = simulate_physical(m, psi0, t, dt, rng, false);
    Eigen::VectorXd out(3);
    out << traj.counts_coupling[kTransferFromOne], traj.counts_coupling[kExcitationFromOne], traj.W[0];
    return out;
  });
  const SampleStats st = sample_stats(samples);
  const Eigen::VectorXd se = st.standard_error();

  std::vector<double> grid;
  for (int k = 0; k <= 400; ++k) grid.push_back(t * k / 400.0);
  EvolveOptions eo;
  eo.method = EvolveMethod::expm;
  const auto etas = evolve(m, outer_blocks(psi0), grid, eo);
  const Matrix Pp = ops::projector_excited(), sm = ops::sigma_minus();
  const double transfer =
      integrate(grid, etas, [&](double, const BlockDensity& e) { return p.gamma1 * (Pp * e[0]).trace().real(); });
  const double excitation = integrate(
      grid, etas, [&](double, const BlockDensity& e) { return p.gamma0 * p.kappa * e[0].trace().real(); });
  const double drift = integrate(grid, etas, [&](double s, const BlockDensity& e) {
    return std::sqrt(p.gamma0 * p.epsilon) * 2.0 * (std::exp(kI * p.nu * s) * (sm * block_sum(e)).trace()).real();
  });
  CHECK(std::abs(st.mean[0] - transfer) <= 3.0 * se[0]);
  CHECK(std::abs(st.mean[1] - excitation) <= 3.0 * se[1]);
  CHECK(std::abs(st.mean[2] - drift) <= 3.0 * se[2]);
  CHECK(std::abs(drift) > 3.0 * se[2]);  // the drift is resolved, not trivially zero
}

TEST_CASE("physical trajectories are reproducible") {
  const RateModel m = twolevel::build_model(twolevel::reference_params());
  RandomStream a(85, 3), b(85, 3);
  const auto ta = simulate_physical(m, state(ket(1, 0), ket(0, 0)), 1.0, 1e-2, a, false);
  const auto tb = simulate_physical(m, state(ket(1, 0), ket(0, 0)), 1.0, 1e-2, b, false);
  CHECK(ta.W == tb.W);
  CHECK(ta.counts_coupling == tb.counts_coupling);
  CHECK((ta.psi.back().flatten() - tb.psi.back().flatten()).norm() == 0.0);
}
