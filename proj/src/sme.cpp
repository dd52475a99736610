#include "lindrate/sme.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace lindrate {

namespace {

constexpr double kMinIntensity = 1e-14;

int observed_w(const RateModel& m) { return m.observed.d1; }
int observed_n(const RateModel& m) { return m.observed.m1 - m.d1; }
int observed_m(const RateModel& m) { return m.observed.m2 - m.d2; }

void hermitize(Matrix& x) { x = (0.5 * (x + x.adjoint())).eval(); }

// sum_k R^{jk} x_k R^{jk}* for every j
void coupling_sandwich(const CouplingChannel& ch, const BlockDensity& x, BlockDensity& out) {
  const int n = x.n();
  for (int j = 0; j < n; ++j) {
    out[j].setZero();
    for (int k = 0; k < n; ++k) {
      const Matrix& R = ch.op(j, k);
      if (R.isZero(0.0)) continue;
      out[j].noalias() += R * x[k] * R.adjoint();
    }
  }
}

void normalize_trace(BlockDensity& rho) {
  for (int j = 0; j < rho.n(); ++j) hermitize(rho[j]);
  const double tr = rho.total_trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) throw NumericalError("a posteriori state lost its trace");
  rho *= 1.0 / tr;
}

}  // namespace

// ---------------------------------------------------------------------------
// Records

void ObservedIncrements::resize(const RateModel& m) {
  dW.assign(static_cast<std::size_t>(observed_w(m)), 0.0);
  dN.assign(static_cast<std::size_t>(observed_n(m)), 0);
  dM.assign(static_cast<std::size_t>(observed_m(m)), 0);
}

bool ObservedIncrements::any_jump() const {
  return std::any_of(dN.begin(), dN.end(), [](int x) { return x != 0; }) ||
         std::any_of(dM.begin(), dM.end(), [](int x) { return x != 0; });
}

ObservedRecord ObservedRecord::empty_for(const RateModel& m) {
  ObservedRecord r;
  for (int a = 0; a < m.observed.d1; ++a) r.w_channels.push_back(a);
  for (int b = m.d1; b < m.observed.m1; ++b) r.n_channels.push_back(b);
  for (int g = m.d2; g < m.observed.m2; ++g) r.m_channels.push_back(g);
  r.time.push_back(0.0);
  return r;
}

bool ObservedRecord::matches(const RateModel& m) const {
  const ObservedRecord ref = empty_for(m);
  if (ref.w_channels != w_channels || ref.n_channels != n_channels || ref.m_channels != m_channels) return false;
  if (time.size() != steps.size() + 1) return false;
  for (const auto& s : steps)
    if (s.dW.size() != w_channels.size() || s.dN.size() != n_channels.size() || s.dM.size() != m_channels.size())
      return false;
  return true;
}

std::vector<double> ObservedRecord::W_at(std::size_t k) const {
  std::vector<double> w(w_channels.size(), 0.0);
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t a = 0; a < w.size(); ++a) w[a] += steps[s].dW[a];
  return w;
}

std::vector<int> ObservedRecord::N_at(std::size_t k) const {
  std::vector<int> c(n_channels.size(), 0);
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t a = 0; a < c.size(); ++a) c[a] += steps[s].dN[a];
  return c;
}

std::vector<int> ObservedRecord::M_at(std::size_t k) const {
  std::vector<int> c(m_channels.size(), 0);
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t a = 0; a < c.size(); ++a) c[a] += steps[s].dM[a];
  return c;
}

int ObservedRecord::total_jumps() const {
  int total = 0;
  for (const auto& s : steps) {
    for (int x : s.dN) total += x;
    for (int x : s.dM) total += x;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Filter signals

FilterSignals compute_filter_signals(const RateModel& m, const BlockDensity& rho, double t) {
  FilterSignals f;
  for (int a = 0; a < observed_w(m); ++a) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(a)];
    cplx s = 0.0;
    for (int j = 0; j < m.n; ++j) s += ch.factor(j, t) * (ch.base[j] * rho[j]).trace();
    f.m.push_back(2.0 * s.real());
  }
  for (int b = 0; b < observed_n(m); ++b) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(m.d1 + b)];
    double J = 0.0;
    for (int j = 0; j < m.n; ++j) J += (ch.base[j].adjoint() * ch.base[j] * rho[j]).trace().real();
    f.J1.push_back(J);
  }
  for (int g = 0; g < observed_m(m); ++g) {
    const auto& ch = m.coupling[static_cast<std::size_t>(m.d2 + g)];
    double J = 0.0;
    for (int j = 0; j < m.n; ++j)
      for (int k = 0; k < m.n; ++k) J += (ch.op(j, k).adjoint() * ch.op(j, k) * rho[k]).trace().real();
    f.J2.push_back(J);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Linear SME

LinearSmeStepper::LinearSmeStepper(const RateModel& m, double dt)
    : m_(&m), dt_(dt), kernel_(m), g_(assemble(m)), drift_(m.n, m.d), work_(m.n, m.d) {}

void LinearSmeStepper::step(BlockDensity& sigma, double t, const ObservedIncrements& out) const {
  const RateModel& m = *m_;
  const double dt = dt_;
  if (out.any_jump()) {
    for (int b = 0; b < observed_n(m); ++b) {
      if (!out.dN[static_cast<std::size_t>(b)]) continue;
      const auto& ch = m.diagonal[static_cast<std::size_t>(m.d1 + b)];
      for (int j = 0; j < m.n; ++j) work_[j].noalias() = ch.base[j] * sigma[j] * ch.base[j].adjoint() / ch.intensity;
      std::swap(sigma, work_);
    }
    for (int g = 0; g < observed_m(m); ++g) {
      if (!out.dM[static_cast<std::size_t>(g)]) continue;
      const auto& ch = m.coupling[static_cast<std::size_t>(m.d2 + g)];
      coupling_sandwich(ch, sigma, work_);
      work_ *= 1.0 / g_.Lambda[static_cast<std::size_t>(g)];
      std::swap(sigma, work_);
    }
    return;
  }
  kernel_.apply(sigma, drift_);
  for (int j = 0; j < m.n; ++j) {
    work_[j] = sigma[j];
    work_[j].noalias() += dt * drift_[j];
  }
  for (int a = 0; a < observed_w(m); ++a) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(a)];
    const double dW = out.dW[static_cast<std::size_t>(a)];
    for (int j = 0; j < m.n; ++j) {
      const cplx c = dW * ch.factor(j, t);
      work_[j].noalias() += c * (ch.base[j] * sigma[j]);
      work_[j].noalias() += std::conj(c) * (sigma[j] * ch.base[j].adjoint());
    }
  }
  for (int b = 0; b < observed_n(m); ++b) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(m.d1 + b)];
    for (int j = 0; j < m.n; ++j) {
      work_[j].noalias() -= dt * (ch.base[j] * sigma[j] * ch.base[j].adjoint());
      work_[j] += (dt * ch.intensity) * sigma[j];
    }
  }
  for (int g = 0; g < observed_m(m); ++g) {
    const auto& ch = m.coupling[static_cast<std::size_t>(m.d2 + g)];
    coupling_sandwich(ch, sigma, drift_);
    const double Lambda = g_.Lambda[static_cast<std::size_t>(g)];
    for (int j = 0; j < m.n; ++j) {
      work_[j] -= dt * drift_[j];
      work_[j] += (dt * Lambda) * sigma[j];
    }
  }
  std::swap(sigma, work_);
}

BlockDensity step_linear_sme(const RateModel& m, const BlockDensity& sigma, double t, double dt,
                             const ObservedIncrements& outputs) {
  require_same_shape(sigma, BlockDensity(m.n, m.d), "step_linear_sme");
  LinearSmeStepper stepper(m, dt);
  BlockDensity out = sigma;
  stepper.step(out, t, outputs);
  return out;
}

// ---------------------------------------------------------------------------
// Nonlinear SME

NonlinearSmeStepper::NonlinearSmeStepper(const RateModel& m, double dt)
    : m_(&m), dt_(dt), kernel_(m), drift_(m.n, m.d), work_(m.n, m.d) {}

void NonlinearSmeStepper::step(BlockDensity& rho, double t, const ObservedIncrements& innovations) const {
  step(rho, t, innovations, compute_filter_signals(*m_, rho, t));
}

void NonlinearSmeStepper::step(BlockDensity& rho, double t, const ObservedIncrements& inc,
                               const FilterSignals& f) const {
  const RateModel& m = *m_;
  const double dt = dt_;
  if (inc.any_jump()) {
    for (int b = 0; b < observed_n(m); ++b) {
      if (!inc.dN[static_cast<std::size_t>(b)]) continue;
      const auto& ch = m.diagonal[static_cast<std::size_t>(m.d1 + b)];
      double J = 0.0;
      for (int j = 0; j < m.n; ++j) J += (ch.base[j].adjoint() * ch.base[j] * rho[j]).trace().real();
      if (J < kMinIntensity) {
        std::ostringstream os;
        os << "nonlinear SME: jump on channel " << m.d1 + b + 1 << " with conditional intensity " << J;
        throw NumericalError(os.str());
      }
      for (int j = 0; j < m.n; ++j) work_[j].noalias() = ch.base[j] * rho[j] * ch.base[j].adjoint() / J;
      std::swap(rho, work_);
    }
    for (int g = 0; g < observed_m(m); ++g) {
      if (!inc.dM[static_cast<std::size_t>(g)]) continue;
      const auto& ch = m.coupling[static_cast<std::size_t>(m.d2 + g)];
      coupling_sandwich(ch, rho, work_);
      const double J = work_.total_trace().real();
      if (J < kMinIntensity) {
        std::ostringstream os;
        os << "nonlinear SME: summed jump on coupling channel " << m.d2 + g + 1 << " with conditional intensity " << J;
        throw NumericalError(os.str());
      }
      work_ *= 1.0 / J;
      std::swap(rho, work_);
    }
    normalize_trace(rho);
    return;
  }
  kernel_.apply(rho, drift_);
  for (int j = 0; j < m.n; ++j) {
    work_[j] = rho[j];
    work_[j].noalias() += dt * drift_[j];
  }
  for (int a = 0; a < observed_w(m); ++a) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(a)];
    const double dW = inc.dW[static_cast<std::size_t>(a)];
    const double ma = f.m[static_cast<std::size_t>(a)];
    for (int j = 0; j < m.n; ++j) {
      const cplx c = dW * ch.factor(j, t);
      work_[j].noalias() += c * (ch.base[j] * rho[j]);
      work_[j].noalias() += std::conj(c) * (rho[j] * ch.base[j].adjoint());
      work_[j] -= (ma * dW) * rho[j];
    }
  }
  for (int b = 0; b < observed_n(m); ++b) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(m.d1 + b)];
    const double J = f.J1[static_cast<std::size_t>(b)];
    for (int j = 0; j < m.n; ++j) {
      work_[j].noalias() -= dt * (ch.base[j] * rho[j] * ch.base[j].adjoint());
      work_[j] += (dt * J) * rho[j];
    }
  }
  for (int g = 0; g < observed_m(m); ++g) {
    const auto& ch = m.coupling[static_cast<std::size_t>(m.d2 + g)];
    coupling_sandwich(ch, rho, drift_);
    const double J = f.J2[static_cast<std::size_t>(g)];
    for (int j = 0; j < m.n; ++j) {
      work_[j] -= dt * drift_[j];
      work_[j] += (dt * J) * rho[j];
    }
  }
  std::swap(rho, work_);
  normalize_trace(rho);
}

BlockDensity step_nonlinear_sme(const RateModel& m, const BlockDensity& rho, double t, double dt,
                                const ObservedIncrements& innovations) {
  require_same_shape(rho, BlockDensity(m.n, m.d), "step_nonlinear_sme");
  NonlinearSmeStepper stepper(m, dt);
  BlockDensity out = rho;
  stepper.step(out, t, innovations);
  return out;
}

// ---------------------------------------------------------------------------
// Simulation and replay

namespace {

std::size_t horizon_steps(double t, double dt, double& h) {
  const double grid[] = {t};
  return grid_steps(grid, dt, h).front();
}

void sample_reference_outputs(const RateModel& m, const AssembledGenerators& g, double dt, RandomStream& rng,
                              ObservedIncrements& out) {
  const double sdt = std::sqrt(dt);
  for (auto& w : out.dW) w = sdt * rng.normal();
  for (int b = 0; b < observed_n(m); ++b) {
    const double lambda = m.diagonal[static_cast<std::size_t>(m.d1 + b)].intensity;
    out.dN[static_cast<std::size_t>(b)] = rng.bernoulli(-std::expm1(-lambda * dt)) ? 1 : 0;
  }
  for (int q = 0; q < observed_m(m); ++q) {
    const double Lambda = g.Lambda[static_cast<std::size_t>(q)];
    out.dM[static_cast<std::size_t>(q)] = Lambda > 0.0 && rng.bernoulli(-std::expm1(-Lambda * dt)) ? 1 : 0;
  }
}

// Draws the physical innovations and jumps at rho(t-); fills the innovation
// increments used by the stepper and the recorded outputs.
void sample_physical_outputs(const RateModel& m, const FilterSignals& f, double dt, RandomStream& rng,
                             ObservedIncrements& innovation, ObservedIncrements& output) {
  const double sdt = std::sqrt(dt);
  for (std::size_t a = 0; a < innovation.dW.size(); ++a) {
    innovation.dW[a] = sdt * rng.normal();
    output.dW[a] = innovation.dW[a] + f.m[a] * dt;
  }
  bool fired = false;
  for (int b = 0; b < observed_n(m); ++b) {
    const double u = rng.uniform();
    const int x = !fired && u < -std::expm1(-f.J1[static_cast<std::size_t>(b)] * dt) ? 1 : 0;
    fired = fired || x;
    innovation.dN[static_cast<std::size_t>(b)] = output.dN[static_cast<std::size_t>(b)] = x;
  }
  for (int q = 0; q < observed_m(m); ++q) {
    const double u = rng.uniform();
    const int x = !fired && u < -std::expm1(-f.J2[static_cast<std::size_t>(q)] * dt) ? 1 : 0;
    fired = fired || x;
    innovation.dM[static_cast<std::size_t>(q)] = output.dM[static_cast<std::size_t>(q)] = x;
  }
}

}  // namespace

SmeRun simulate_linear_sme(const RateModel& m, const BlockDensity& eta0, double t, double dt, RandomStream& rng,
                           Retain retain) {
  require_same_shape(eta0, BlockDensity(m.n, m.d), "simulate_linear_sme");
  double h = 0.0;
  const std::size_t steps = horizon_steps(t, dt, h);
  const LinearSmeStepper stepper(m, h);
  const AssembledGenerators g = assemble(m);
  SmeRun run;
  run.record = ObservedRecord::empty_for(m);
  BlockDensity sigma = eta0;
  ObservedIncrements inc;
  inc.resize(m);
  auto keep = [&](double time) {
    run.state.time.push_back(time);
    run.state.sigma.push_back(sigma);
    const double p = sigma.total_trace().real();
    run.state.p.push_back(p);
    run.state.rho.push_back(p > 0.0 ? cplx(1.0 / p) * sigma : sigma);
  };
  if (retain == Retain::full) keep(0.0);
  if (retain != Retain::final_state) run.record.steps.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double tk = static_cast<double>(k) * h;
    sample_reference_outputs(m, g, h, rng, inc);
    stepper.step(sigma, tk, inc);
    if (retain != Retain::final_state) {
      run.record.steps.push_back(inc);
      run.record.time.push_back(static_cast<double>(k + 1) * h);
    }
    if (retain == Retain::full) keep(static_cast<double>(k + 1) * h);
  }
  if (retain != Retain::full) keep(static_cast<double>(steps) * h);
  return run;
}

SmeRun simulate_nonlinear_sme(const RateModel& m, const BlockDensity& eta0, double t, double dt, RandomStream& rng,
                              Retain retain) {
  require_same_shape(eta0, BlockDensity(m.n, m.d), "simulate_nonlinear_sme");
  double h = 0.0;
  const std::size_t steps = horizon_steps(t, dt, h);
  const NonlinearSmeStepper stepper(m, h);
  SmeRun run;
  run.record = ObservedRecord::empty_for(m);
  BlockDensity rho = eta0;
  normalize_trace(rho);
  ObservedIncrements innovation, output;
  innovation.resize(m);
  output.resize(m);
  auto keep = [&](double time) {
    run.state.time.push_back(time);
    run.state.rho.push_back(rho);
  };
  if (retain == Retain::full) keep(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double tk = static_cast<double>(k) * h;
    const FilterSignals f = compute_filter_signals(m, rho, tk);
    sample_physical_outputs(m, f, h, rng, innovation, output);
    stepper.step(rho, tk, innovation, f);
    if (retain != Retain::final_state) {
      run.record.steps.push_back(output);
      run.record.time.push_back(static_cast<double>(k + 1) * h);
    }
    if (retain == Retain::full) keep(static_cast<double>(k + 1) * h);
  }
  if (retain != Retain::full) keep(static_cast<double>(steps) * h);
  return run;
}

ConditionalState filter_linear(const RateModel& m, const BlockDensity& eta0, const ObservedRecord& record) {
  if (!record.matches(m)) throw DimensionError("filter_linear: record does not match the model's observed channels");
  ConditionalState st;
  BlockDensity sigma = eta0;
  auto keep = [&](double time) {
    st.time.push_back(time);
    st.sigma.push_back(sigma);
    const double p = sigma.total_trace().real();
    st.p.push_back(p);
    st.rho.push_back(p > 0.0 ? cplx(1.0 / p) * sigma : sigma);
  };
  keep(record.time.front());
  for (std::size_t k = 0; k < record.steps.size(); ++k) {
    const LinearSmeStepper stepper(m, record.time[k + 1] - record.time[k]);
    stepper.step(sigma, record.time[k], record.steps[k]);
    keep(record.time[k + 1]);
  }
  return st;
}

ConditionalState filter_nonlinear(const RateModel& m, const BlockDensity& eta0, const ObservedRecord& record) {
  if (!record.matches(m)) throw DimensionError("filter_nonlinear: record does not match the model's observed channels");
  ConditionalState st;
  BlockDensity rho = eta0;
  normalize_trace(rho);
  st.time.push_back(record.time.front());
  st.rho.push_back(rho);
  ObservedIncrements innovation;
  innovation.resize(m);
  double h_prev = -1.0;
  std::unique_ptr<NonlinearSmeStepper> stepper;
  for (std::size_t k = 0; k < record.steps.size(); ++k) {
    const double h = record.time[k + 1] - record.time[k];
    if (!stepper || h != h_prev) {
      stepper = std::make_unique<NonlinearSmeStepper>(m, h);
      h_prev = h;
    }
    const double tk = record.time[k];
    const FilterSignals f = compute_filter_signals(m, rho, tk);
    const ObservedIncrements& out = record.steps[k];
    for (std::size_t a = 0; a < innovation.dW.size(); ++a) innovation.dW[a] = out.dW[a] - f.m[a] * h;
    innovation.dN = out.dN;
    innovation.dM = out.dM;
    stepper->step(rho, tk, innovation, f);
    st.time.push_back(record.time[k + 1]);
    st.rho.push_back(rho);
  }
  return st;
}

ObservedRecord extract_record(const RateModel& m, const PhysicalTrajectory& traj) {
  if (traj.output.size() + 1 != traj.time.size())
    throw std::invalid_argument("extract_record: trajectory was not retained");
  ObservedRecord r = ObservedRecord::empty_for(m);
  r.time = traj.time;
  r.steps.reserve(traj.output.size());
  ObservedIncrements inc;
  inc.resize(m);
  for (const auto& s : traj.output) {
    for (int a = 0; a < observed_w(m); ++a) inc.dW[static_cast<std::size_t>(a)] = s.dW[static_cast<std::size_t>(a)];
    for (int b = 0; b < observed_n(m); ++b) inc.dN[static_cast<std::size_t>(b)] = s.dN[static_cast<std::size_t>(b)];
    for (int g = 0; g < observed_m(m); ++g) {
      int total = 0;
      for (int k = 0; k < m.n; ++k) total += s.dN_coupling[static_cast<std::size_t>(g * m.n + k)];
      inc.dM[static_cast<std::size_t>(g)] = total;
    }
    r.steps.push_back(inc);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Averages and instruments

UnravelResult average_linear_sme(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                                 const McOptions& options) {
  require_valid(m);
  double h = 0.0;
  const auto marks = grid_steps(grid, options.dt, h);
  const Eigen::Index block = packed_size(m.n, m.d) + 1;
  const AssembledGenerators g = assemble(m);
  auto samples = run_indexed(options.ntraj, options.workers, [&](std::size_t i) {
    RandomStream rng(options.seed, i);
    const LinearSmeStepper stepper(m, h);
    BlockDensity sigma = eta0;
    ObservedIncrements inc;
    inc.resize(m);
    Eigen::VectorXd out(block * static_cast<Eigen::Index>(marks.size()));
    std::size_t k = 0;
    for (std::size_t q = 0; q < marks.size(); ++q) {
      for (; k < marks[q]; ++k) {
        sample_reference_outputs(m, g, h, rng, inc);
        stepper.step(sigma, static_cast<double>(k) * h, inc);
      }
      const auto off = static_cast<Eigen::Index>(q) * block;
      out.segment(off, block - 1) = pack(sigma);
      out[off + block - 1] = sigma.total_trace().real();
    }
    return out;
  });
  const SampleStats stats = sample_stats(samples);
  const Eigen::VectorXd se = stats.standard_error();
  UnravelResult result;
  result.dt = h;
  result.ntraj = options.ntraj;
  for (std::size_t q = 0; q < marks.size(); ++q) {
    const auto off = static_cast<Eigen::Index>(q) * block;
    UnravelPoint pt;
    pt.time = grid[q];
    pt.state = block_estimate(stats, off, m.n, m.d);
    pt.p_mean = stats.mean[off + block - 1];
    pt.p_se = se[off + block - 1];
    result.points.push_back(std::move(pt));
  }
  return result;
}

UnravelResult average_nonlinear_sme(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                                    const McOptions& options) {
  require_valid(m);
  double h = 0.0;
  const auto marks = grid_steps(grid, options.dt, h);
  const Eigen::Index block = packed_size(m.n, m.d);
  auto samples = run_indexed(options.ntraj, options.workers, [&](std::size_t i) {
    RandomStream rng(options.seed, i);
    const NonlinearSmeStepper stepper(m, h);
    BlockDensity rho = eta0;
    normalize_trace(rho);
    ObservedIncrements innovation, output;
    innovation.resize(m);
    output.resize(m);
    Eigen::VectorXd out(block * static_cast<Eigen::Index>(marks.size()));
    std::size_t k = 0;
    for (std::size_t q = 0; q < marks.size(); ++q) {
      for (; k < marks[q]; ++k) {
        const double tk = static_cast<double>(k) * h;
        const FilterSignals f = compute_filter_signals(m, rho, tk);
        sample_physical_outputs(m, f, h, rng, innovation, output);
        stepper.step(rho, tk, innovation, f);
      }
      out.segment(static_cast<Eigen::Index>(q) * block, block) = pack(rho);
    }
    return out;
  });
  const SampleStats stats = sample_stats(samples);
  UnravelResult result;
  result.dt = h;
  result.ntraj = options.ntraj;
  for (std::size_t q = 0; q < marks.size(); ++q) {
    UnravelPoint pt;
    pt.time = grid[q];
    pt.state = block_estimate(stats, static_cast<Eigen::Index>(q) * block, m.n, m.d);
    result.points.push_back(std::move(pt));
  }
  return result;
}

InstrumentEstimate instrument_statistic(const RateModel& m, const BlockDensity& eta0, double t,
                                        const McOptions& options, const EventPredicate& F) {
  require_valid(m);
  const Eigen::Index block = packed_size(m.n, m.d);
  auto samples = run_indexed(options.ntraj, options.workers, [&](std::size_t i) {
    RandomStream rng(options.seed, i);
    const SmeRun run = simulate_linear_sme(m, eta0, t, options.dt, rng, Retain::record);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(block + 1);
    if (F(run.record)) {
      out.head(block) = pack(run.state.sigma.back());
      out[block] = run.state.p.back();
    }
    return out;
  });
  const SampleStats stats = sample_stats(samples);
  InstrumentEstimate est;
  est.value = block_estimate(stats, 0, m.n, m.d);
  est.probability = stats.mean[block];
  est.probability_se = stats.standard_error()[block];
  return est;
}

ProbabilityEstimate event_probability(const RateModel& m, const BlockDensity& eta0, double t,
                                      const McOptions& options, const EventPredicate& F) {
  require_valid(m);
  auto samples = run_indexed(options.ntraj, options.workers, [&](std::size_t i) {
    RandomStream rng(options.seed, i);
    const SmeRun run = simulate_nonlinear_sme(m, eta0, t, options.dt, rng, Retain::record);
    Eigen::VectorXd out(1);
    out[0] = F(run.record) ? 1.0 : 0.0;
    return out;
  });
  const SampleStats stats = sample_stats(samples);
  return {stats.mean[0], stats.standard_error()[0]};
}

EventPredicate no_observed_jumps() {
  return [](const ObservedRecord& r) { return r.total_jumps() == 0; };
}

}  // namespace lindrate
