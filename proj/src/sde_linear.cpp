#include "lindrate/sde_linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lindrate {

Signals compute_signals(const RateModel& m, const BlockVector& psi, double t) {
  Signals s;
  compute_signals(m, psi, t, s);
  return s;
}

void compute_signals(const RateModel& m, const BlockVector& psi, double t, Signals& s) {
  s.v.clear();
  s.v_coupling.clear();
  s.I.clear();
  s.I_coupling.clear();
  for (int a = 0; a < m.d1; ++a) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(a)];
    double v = 0.0;
    for (int j = 0; j < m.n; ++j) v += 2.0 * (ch.factor(j, t) * psi[j].dot(ch.base[j] * psi[j])).real();
    s.v.push_back(v);
  }
  for (int a = 0; a < m.d2; ++a) {
    const auto& ch = m.coupling[static_cast<std::size_t>(a)];
    for (int k = 0; k < m.n; ++k) {
      double v = 0.0;
      for (int j = 0; j < m.n; ++j) v += 2.0 * psi[j].dot(ch.op(j, k) * psi[k]).real();
      s.v_coupling.push_back(v);
    }
  }
  for (int a = m.d1; a < m.m1(); ++a) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(a)];
    double I = 0.0;
    for (int j = 0; j < m.n; ++j) I += (ch.base[j] * psi[j]).squaredNorm();
    s.I.push_back(I);
  }
  for (int a = m.d2; a < m.m2(); ++a) {
    const auto& ch = m.coupling[static_cast<std::size_t>(a)];
    for (int k = 0; k < m.n; ++k) {
      double I = 0.0;
      for (int j = 0; j < m.n; ++j) I += (ch.op(j, k) * psi[k]).squaredNorm();
      s.I_coupling.push_back(I);
    }
  }
}

BlockVector normalized_state(const BlockVector& zeta) {
  const double nrm = zeta.norm();
  if (nrm > 0.0) return cplx(1.0 / nrm) * zeta;
  BlockVector out(zeta.n(), zeta.d());
  for (int j = 0; j < zeta.n(); ++j) out[j][0] = 1.0 / std::sqrt(static_cast<double>(zeta.n()));
  return out;
}

LinearStepper::LinearStepper(const RateModel& m, double dt) : m_(&m), dt_(dt), work_(m.n, m.d) {
  const AssembledGenerators g = assemble(m);
  for (int j = 0; j < m.n; ++j)
    drift_.push_back(Matrix::Identity(m.d, m.d) + dt * (g.K[j] + 0.5 * g.lambda_total * Matrix::Identity(m.d, m.d)));
}

int LinearStepper::apply_jumps(BlockVector& zeta, double t, const StepNoise& noise) const {
  const RateModel& m = *m_;
  int applied = 0;
  for (int a = 0; a < m.jump_diagonal_count(); ++a) {
    if (!noise.dN[static_cast<std::size_t>(a)]) continue;
    const auto& ch = m.diagonal[static_cast<std::size_t>(m.d1 + a)];
    const double s = 1.0 / std::sqrt(ch.intensity);
    for (int j = 0; j < m.n; ++j) work_[j].noalias() = (s * ch.factor(j, t)) * (ch.base[j] * zeta[j]);
    std::swap(zeta, work_);
    ++applied;
  }
  for (int a = 0; a < m.jump_coupling_count(); ++a) {
    const auto& ch = m.coupling[static_cast<std::size_t>(m.d2 + a)];
    for (int k = 0; k < m.n; ++k) {
      if (!noise.dN_coupling[static_cast<std::size_t>(a * m.n + k)]) continue;
      const double s = 1.0 / std::sqrt(ch.intensity[static_cast<std::size_t>(k)]);
      for (int j = 0; j < m.n; ++j) work_[j].noalias() = s * (ch.op(j, k) * zeta[k]);
      std::swap(zeta, work_);
      ++applied;
    }
  }
  return applied;
}

void LinearStepper::step(BlockVector& zeta, double t, const StepNoise& noise) const {
  if (noise.any_jump()) {
    apply_jumps(zeta, t, noise);
    return;
  }
  const RateModel& m = *m_;
  for (int j = 0; j < m.n; ++j) work_[j].noalias() = drift_[static_cast<std::size_t>(j)] * zeta[j];
  for (int a = 0; a < m.d1; ++a) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(a)];
    const double dW = noise.dW[static_cast<std::size_t>(a)];
    for (int j = 0; j < m.n; ++j) work_[j].noalias() += (dW * ch.factor(j, t)) * (ch.base[j] * zeta[j]);
  }
  for (int a = 0; a < m.d2; ++a) {
    const auto& ch = m.coupling[static_cast<std::size_t>(a)];
    for (int k = 0; k < m.n; ++k) {
      const double dW = noise.dW_coupling[static_cast<std::size_t>(a * m.n + k)];
      for (int j = 0; j < m.n; ++j) work_[j].noalias() += dW * (ch.op(j, k) * zeta[k]);
    }
  }
  std::swap(zeta, work_);
}

BlockVector step_linear(const RateModel& m, const BlockVector& zeta, double t, double dt, const StepNoise& noise) {
  if (zeta.n() != m.n || zeta.d() != m.d) throw DimensionError("step_linear: state shape mismatch");
  LinearStepper stepper(m, dt);
  BlockVector out = zeta;
  stepper.step(out, t, noise);
  return out;
}

namespace {

std::size_t steps_for(double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("horizon must be non-negative");
  return t == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
}

void log_jumps(const RateModel& m, const StepNoise& noise, double time, std::vector<JumpEvent>& out) {
  for (int a = 0; a < m.jump_diagonal_count(); ++a)
    if (noise.dN[static_cast<std::size_t>(a)]) out.push_back({time, false, m.d1 + a, -1});
  for (int a = 0; a < m.jump_coupling_count(); ++a)
    for (int k = 0; k < m.n; ++k)
      if (noise.dN_coupling[static_cast<std::size_t>(a * m.n + k)]) out.push_back({time, true, m.d2 + a, k});
}

}  // namespace

LinearTrajectory simulate_linear(const RateModel& m, const BlockVector& zeta0, double t, double dt,
                                 RandomStream& rng, bool retain_path) {
  if (zeta0.n() != m.n || zeta0.d() != m.d) throw DimensionError("simulate_linear: state shape mismatch");
  const std::size_t steps = steps_for(t, dt);
  const double h = steps ? t / static_cast<double>(steps) : dt;
  LinearStepper stepper(m, h);
  LinearTrajectory traj;
  traj.time.reserve(steps + 1);
  traj.p.reserve(steps + 1);
  BlockVector zeta = zeta0;
  StepNoise noise;
  noise.resize(m);
  traj.time.push_back(0.0);
  traj.p.push_back(zeta.squared_norm());
  if (retain_path) {
    traj.zeta.push_back(zeta);
    traj.noise.reserve(steps);
    traj.signals.reserve(steps);
  }
  for (std::size_t k = 0; k < steps; ++k) {
    const double tk = static_cast<double>(k) * h;
    if (retain_path) traj.signals.push_back(compute_signals(m, normalized_state(zeta), tk));
    sample_reference_noise(m, h, rng, noise);
    stepper.step(zeta, tk, noise);
    const double t1 = static_cast<double>(k + 1) * h;
    if (noise.any_jump()) log_jumps(m, noise, t1, traj.jumps);
    traj.time.push_back(t1);
    traj.p.push_back(zeta.squared_norm());
    if (retain_path) {
      traj.noise.push_back(noise);
      traj.zeta.push_back(zeta);
    }
  }
  if (!retain_path) traj.zeta.push_back(zeta);
  return traj;
}

std::vector<double> doleans_density(const RateModel& m, const LinearTrajectory& traj) {
  const std::size_t steps = traj.time.size() - 1;
  if (traj.noise.size() != steps || traj.signals.size() != steps || traj.p.empty())
    throw std::invalid_argument("doleans_density: trajectory was not retained");
  std::vector<double> out;
  out.reserve(steps + 1);
  double log_p = std::log(traj.p.front());
  bool absorbed = traj.p.front() == 0.0;
  out.push_back(absorbed ? 0.0 : traj.p.front());
  for (std::size_t k = 0; k < steps; ++k) {
    const double h = traj.time[k + 1] - traj.time[k];
    const Signals& s = traj.signals[k];
    const StepNoise& dn = traj.noise[k];
    for (std::size_t a = 0; a < s.v.size(); ++a) log_p += s.v[a] * dn.dW[a] - 0.5 * s.v[a] * s.v[a] * h;
    for (std::size_t a = 0; a < s.v_coupling.size(); ++a)
      log_p += s.v_coupling[a] * dn.dW_coupling[a] - 0.5 * s.v_coupling[a] * s.v_coupling[a] * h;
    for (int a = 0; a < m.jump_diagonal_count(); ++a) {
      const double lambda = m.diagonal[static_cast<std::size_t>(m.d1 + a)].intensity;
      const double I = s.I[static_cast<std::size_t>(a)];
      log_p += (lambda - I) * h;
      if (dn.dN[static_cast<std::size_t>(a)]) {
        if (I == 0.0) absorbed = true;
        else log_p += std::log(I / lambda);
      }
    }
    for (int a = 0; a < m.jump_coupling_count(); ++a) {
      const auto& ch = m.coupling[static_cast<std::size_t>(m.d2 + a)];
      for (int k2 = 0; k2 < m.n; ++k2) {
        const std::size_t idx = static_cast<std::size_t>(a * m.n + k2);
        const double lambda = ch.intensity[static_cast<std::size_t>(k2)];
        const double I = s.I_coupling[idx];
        log_p += (lambda - I) * h;
        if (dn.dN_coupling[idx]) {
          if (I == 0.0) absorbed = true;
          else log_p += std::log(I / lambda);
        }
      }
    }
    out.push_back(absorbed ? 0.0 : std::exp(log_p));
  }
  return out;
}

InitialSampler::InitialSampler(const BlockDensity& eta0) {
  const auto issues = eta0.check(Tolerances{}, true);
  if (!issues.empty()) {
    std::ostringstream os;
    os << "initial state is not a normalized block density:";
    for (const auto& s : issues) os << " " << s << ";";
    throw std::invalid_argument(os.str());
  }
  for (int i = 0; i < eta0.n(); ++i) {
    const Matrix h = 0.5 * (eta0[i] + eta0[i].adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    for (int k = 0; k < eta0.d(); ++k) {
      const double w = es.eigenvalues()[k];
      if (w <= 1e-13) continue;
      BlockVector v(eta0.n(), eta0.d());
      v[i] = es.eigenvectors().col(k);
      states_.push_back(std::move(v));
      weights_.push_back(w);
    }
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  for (auto& w : weights_) w /= total;
  std::partial_sum(weights_.begin(), weights_.end(), std::back_inserter(cumulative_));
}

InitialSampler::InitialSampler(std::vector<BlockVector> states, std::vector<double> weights)
    : states_(std::move(states)), weights_(std::move(weights)) {
  if (states_.empty() || states_.size() != weights_.size())
    throw std::invalid_argument("InitialSampler: need one weight per state");
  for (double w : weights_)
    if (!(w >= 0.0)) throw std::invalid_argument("InitialSampler: weights must be non-negative");
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("InitialSampler: weights sum to zero");
  for (auto& w : weights_) w /= total;
  std::partial_sum(weights_.begin(), weights_.end(), std::back_inserter(cumulative_));
}

BlockVector InitialSampler::sample(RandomStream& rng) const {
  if (deterministic()) return states_.front();
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), states_.size() - 1);
  return states_[idx];
}

std::vector<std::size_t> grid_steps(std::span<const double> grid, double dt, double& dt_used) {
  if (grid.empty()) throw std::invalid_argument("time grid is empty");
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (!(grid[g] > grid[g - 1])) throw std::invalid_argument("time grid must be increasing");
  const std::size_t total = steps_for(grid.back(), dt);
  dt_used = total ? grid.back() / static_cast<double>(total) : dt;
  std::vector<std::size_t> out;
  for (double t : grid) {
    if (t < 0.0) throw std::invalid_argument("time grid must be non-negative");
    const double k = std::round(t / dt_used);
    if (std::abs(k * dt_used - t) > 1e-6 * dt_used) {
      std::ostringstream os;
      os << "grid time " << t << " is not a multiple of the step " << dt_used;
      throw std::invalid_argument(os.str());
    }
    out.push_back(static_cast<std::size_t>(k));
  }
  return out;
}

UnravelResult unravel_weighted(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                               const McOptions& options) {
  require_valid(m);
  if (options.ntraj < 1) throw std::invalid_argument("unravel_weighted: need at least one trajectory");
  double h = 0.0;
  const auto marks = grid_steps(grid, options.dt, h);
  const InitialSampler sampler(eta0);
  const Eigen::Index block = packed_size(m.n, m.d) + 1;

  auto samples = run_indexed(options.ntraj, options.workers, [&](std::size_t i) {
    RandomStream rng(options.seed, i);
    BlockVector zeta = sampler.sample(rng);
    const LinearStepper stepper(m, h);
    StepNoise noise;
    noise.resize(m);
    Eigen::VectorXd out(block * static_cast<Eigen::Index>(marks.size()));
    std::size_t k = 0;
    for (std::size_t g = 0; g < marks.size(); ++g) {
      for (; k < marks[g]; ++k) {
        sample_reference_noise(m, h, rng, noise);
        stepper.step(zeta, static_cast<double>(k) * h, noise);
      }
      const auto off = static_cast<Eigen::Index>(g) * block;
      out.segment(off, block - 1) = pack(outer_blocks(zeta));
      out[off + block - 1] = zeta.squared_norm();
    }
    return out;
  });

  const SampleStats stats = sample_stats(samples);
  const Eigen::VectorXd se = stats.standard_error();
  UnravelResult result;
  result.dt = h;
  result.ntraj = options.ntraj;
  for (std::size_t g = 0; g < marks.size(); ++g) {
    const auto off = static_cast<Eigen::Index>(g) * block;
    UnravelPoint pt;
    pt.time = grid[g];
    pt.state = block_estimate(stats, off, m.n, m.d);
    pt.p_mean = stats.mean[off + block - 1];
    pt.p_se = se[off + block - 1];
    result.points.push_back(std::move(pt));
  }
  return result;
}

UnravelPoint unravel_weighted(const RateModel& m, const BlockDensity& eta0, double t, const McOptions& options) {
  const double grid[] = {t};
  return unravel_weighted(m, eta0, grid, options).points.front();
}

}  // namespace lindrate
