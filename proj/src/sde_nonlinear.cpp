#include "lindrate/sde_nonlinear.hpp"

#include <cmath>
#include <sstream>

namespace lindrate {

namespace {

constexpr double kMinIntensity = 1e-14;

[[noreturn]] void fired_at_zero(const char* kind, int channel, double I) {
  std::ostringstream os;
  os << "physical step: " << kind << " jump channel " << channel + 1 << " fired with intensity " << I;
  throw NumericalError(os.str());
}

}  // namespace

void PhysicalDraws::resize(const RateModel& m) {
  dW.assign(static_cast<std::size_t>(m.d1), 0.0);
  dW_coupling.assign(static_cast<std::size_t>(m.d2 * m.n), 0.0);
  u.assign(static_cast<std::size_t>(m.jump_diagonal_count()), 1.0);
  u_coupling.assign(static_cast<std::size_t>(m.jump_coupling_count() * m.n), 1.0);
}

void PhysicalDraws::sample(double dt, RandomStream& rng) {
  const double sdt = std::sqrt(dt);
  for (auto& w : dW) w = sdt * rng.normal();
  for (auto& w : dW_coupling) w = sdt * rng.normal();
  for (auto& x : u) x = rng.uniform();
  for (auto& x : u_coupling) x = rng.uniform();
}

PhysicalStepper::PhysicalStepper(const RateModel& m, double dt)
    : m_(&m), dt_(dt), g_(assemble(m)), work_(m.n, m.d) {}

void PhysicalStepper::step(BlockVector& psi, double t, const PhysicalDraws& draws, PhysicalStep& info) const {
  const RateModel& m = *m_;
  const double dt = dt_;
  Signals& s = info.signals;
  compute_signals(m, psi, t, s);
  if (info.output.dW.size() != static_cast<std::size_t>(m.d1)) info.output.resize(m);
  info.output.clear();
  info.jumps.clear();
  for (int a = 0; a < m.d1; ++a)
    info.output.dW[static_cast<std::size_t>(a)] = draws.dW[static_cast<std::size_t>(a)] + s.v[static_cast<std::size_t>(a)] * dt;
  for (std::size_t a = 0; a < s.v_coupling.size(); ++a)
    info.output.dW_coupling[a] = draws.dW_coupling[a] + s.v_coupling[a] * dt;

  // Jumps, first firing channel in order.
  for (int a = 0; a < m.jump_diagonal_count(); ++a) {
    const double I = s.I[static_cast<std::size_t>(a)];
    if (!(draws.u[static_cast<std::size_t>(a)] < -std::expm1(-I * dt))) continue;
    if (I < kMinIntensity) fired_at_zero("diagonal", m.d1 + a, I);
    const auto& ch = m.diagonal[static_cast<std::size_t>(m.d1 + a)];
    const double sc = 1.0 / std::sqrt(I);
    for (int j = 0; j < m.n; ++j) work_[j].noalias() = (sc * ch.factor(j, t)) * (ch.base[j] * psi[j]);
    std::swap(psi, work_);
    info.output.dN[static_cast<std::size_t>(a)] = 1;
    info.jumps.push_back({t + dt, false, m.d1 + a, -1});
    psi *= 1.0 / psi.norm();
    return;
  }
  for (int a = 0; a < m.jump_coupling_count(); ++a) {
    const auto& ch = m.coupling[static_cast<std::size_t>(m.d2 + a)];
    for (int k = 0; k < m.n; ++k) {
      const std::size_t idx = static_cast<std::size_t>(a * m.n + k);
      const double I = s.I_coupling[idx];
      if (!(draws.u_coupling[idx] < -std::expm1(-I * dt))) continue;
      if (I < kMinIntensity) fired_at_zero("coupling", m.d2 + a, I);
      const double sc = 1.0 / std::sqrt(I);
      for (int j = 0; j < m.n; ++j) work_[j].noalias() = sc * (ch.op(j, k) * psi[k]);
      std::swap(psi, work_);
      info.output.dN_coupling[idx] = 1;
      info.jumps.push_back({t + dt, true, m.d2 + a, k});
      psi *= 1.0 / psi.norm();
      return;
    }
  }

  double half_I = 0.0;
  for (double I : s.I) half_I += 0.5 * I;
  for (double I : s.I_coupling) half_I += 0.5 * I;
  for (int j = 0; j < m.n; ++j) {
    work_[j] = psi[j];
    work_[j].noalias() += dt * (g_.K[j] * psi[j]);
    work_[j] += (dt * half_I) * psi[j];
  }
  for (int a = 0; a < m.d1; ++a) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(a)];
    const double v = s.v[static_cast<std::size_t>(a)];
    const double dW = draws.dW[static_cast<std::size_t>(a)];
    // drift 1/2 v (L - v/4) psi, diffusion (L - v/2) psi dW
    const double cL = 0.5 * v * dt + dW;
    const double cI = -0.125 * v * v * dt - 0.5 * v * dW;
    for (int j = 0; j < m.n; ++j) {
      work_[j].noalias() += (cL * ch.factor(j, t)) * (ch.base[j] * psi[j]);
      work_[j] += cI * psi[j];
    }
  }
  for (int a = 0; a < m.d2; ++a) {
    const auto& ch = m.coupling[static_cast<std::size_t>(a)];
    for (int k = 0; k < m.n; ++k) {
      const std::size_t idx = static_cast<std::size_t>(a * m.n + k);
      const double v = s.v_coupling[idx];
      const double dW = draws.dW_coupling[idx];
      const double cR = 0.5 * v * dt + dW;
      const double cI = -0.125 * v * v * dt - 0.5 * v * dW;
      for (int j = 0; j < m.n; ++j) {
        work_[j].noalias() += cR * (ch.op(j, k) * psi[k]);
        work_[j] += cI * psi[j];
      }
    }
  }
  std::swap(psi, work_);
  const double nrm = psi.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw NumericalError("physical step: state norm collapsed");
  psi *= 1.0 / nrm;
}

BlockVector step_physical(const RateModel& m, const BlockVector& psi, double t, double dt,
                          const PhysicalDraws& draws, PhysicalStep* info) {
  if (psi.n() != m.n || psi.d() != m.d) throw DimensionError("step_physical: state shape mismatch");
  PhysicalStepper stepper(m, dt);
  PhysicalStep local;
  BlockVector out = psi;
  stepper.step(out, t, draws, info ? *info : local);
  return out;
}

PhysicalTrajectory simulate_physical(const RateModel& m, const BlockVector& psi0, double t, double dt,
                                     RandomStream& rng, bool retain_path) {
  if (psi0.n() != m.n || psi0.d() != m.d) throw DimensionError("simulate_physical: state shape mismatch");
  double h = 0.0;
  const double grid[] = {t};
  const std::size_t steps = grid_steps(grid, dt, h).front();
  const PhysicalStepper stepper(m, h);
  PhysicalTrajectory traj;
  BlockVector psi = normalized_state(psi0);
  PhysicalDraws draws;
  draws.resize(m);
  PhysicalStep info;
  traj.W.assign(static_cast<std::size_t>(m.d1), 0.0);
  traj.counts.assign(static_cast<std::size_t>(m.jump_diagonal_count()), 0);
  traj.counts_coupling.assign(static_cast<std::size_t>(m.jump_coupling_count() * m.n), 0);
  traj.time.push_back(0.0);
  if (retain_path) {
    traj.psi.reserve(steps + 1);
    traj.psi.push_back(psi);
    traj.signals.reserve(steps);
    traj.output.reserve(steps);
  }
  for (std::size_t k = 0; k < steps; ++k) {
    const double tk = static_cast<double>(k) * h;
    draws.sample(h, rng);
    stepper.step(psi, tk, draws, info);
    for (std::size_t a = 0; a < traj.W.size(); ++a) traj.W[a] += info.output.dW[a];
    for (std::size_t a = 0; a < traj.counts.size(); ++a) traj.counts[a] += info.output.dN[a];
    for (std::size_t a = 0; a < traj.counts_coupling.size(); ++a) traj.counts_coupling[a] += info.output.dN_coupling[a];
    traj.jumps.insert(traj.jumps.end(), info.jumps.begin(), info.jumps.end());
    traj.time.push_back(static_cast<double>(k + 1) * h);
    if (retain_path) {
      traj.psi.push_back(psi);
      traj.signals.push_back(info.signals);
      traj.output.push_back(info.output);
    }
  }
  if (!retain_path) traj.psi.push_back(psi);
  return traj;
}

UnravelResult unravel_normalized(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                                 const McOptions& options) {
  require_valid(m);
  if (options.ntraj < 1) throw std::invalid_argument("unravel_normalized: need at least one trajectory");
  double h = 0.0;
  const auto marks = grid_steps(grid, options.dt, h);
  const InitialSampler sampler(eta0);
  const Eigen::Index block = packed_size(m.n, m.d);

  auto samples = run_indexed(options.ntraj, options.workers, [&](std::size_t i) {
    RandomStream rng(options.seed, i);
    BlockVector psi = normalized_state(sampler.sample(rng));
    const PhysicalStepper stepper(m, h);
    PhysicalDraws draws;
    draws.resize(m);
    PhysicalStep info;
    Eigen::VectorXd out(block * static_cast<Eigen::Index>(marks.size()));
    std::size_t k = 0;
    for (std::size_t g = 0; g < marks.size(); ++g) {
      for (; k < marks[g]; ++k) {
        draws.sample(h, rng);
        stepper.step(psi, static_cast<double>(k) * h, draws, info);
      }
      out.segment(static_cast<Eigen::Index>(g) * block, block) = pack(outer_blocks(psi));
    }
    return out;
  });

  const SampleStats stats = sample_stats(samples);
  UnravelResult result;
  result.dt = h;
  result.ntraj = options.ntraj;
  for (std::size_t g = 0; g < marks.size(); ++g) {
    UnravelPoint pt;
    pt.time = grid[g];
    pt.state = block_estimate(stats, static_cast<Eigen::Index>(g) * block, m.n, m.d);
    result.points.push_back(std::move(pt));
  }
  return result;
}

UnravelPoint unravel_normalized(const RateModel& m, const BlockDensity& eta0, double t, const McOptions& options) {
  const double grid[] = {t};
  return unravel_normalized(m, eta0, grid, options).points.front();
}

}  // namespace lindrate
