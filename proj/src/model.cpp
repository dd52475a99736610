#include "lindrate/model.hpp"

#include <cmath>
#include <sstream>

namespace lindrate {

namespace {

std::string indexed(const std::string& what, int i) {
  std::ostringstream os;
  os << what << "[" << i + 1 << "]";
  return os.str();
}

// A T A^* - 1/2 {A^* A, T}
void add_dissipator(Matrix& out, const Matrix& A, const Matrix& T) {
  const Matrix AdA = A.adjoint() * A;
  out.noalias() += A * T * A.adjoint();
  out.noalias() -= 0.5 * (AdA * T + T * AdA);
}

Matrix embed(const Matrix& block, int i, int j, int n) {
  const auto d = block.rows();
  Matrix full = Matrix::Zero(n * d, n * d);
  full.block(i * d, j * d, d, d) = block;
  return full;
}

}  // namespace

PhaseFunction heterodyne_phase(double nu) {
  return [nu](double t) { return std::exp(kI * (nu * t)); };
}

cplx DiagonalChannel::factor(int block, double t) const {
  if (phase.empty()) return 1.0;
  return phase[static_cast<std::size_t>(block)](t);
}

Matrix DiagonalChannel::at(int block, double t) const {
  if (phase.empty()) return base[block];
  return factor(block, t) * base[block];
}

BlockOperator DiagonalChannel::at(double t) const {
  if (phase.empty()) return base;
  BlockOperator out = base;
  for (int j = 0; j < base.n(); ++j) out[j] *= factor(j, t);
  return out;
}

double CouplingChannel::total_intensity() const {
  double s = 0.0;
  for (double l : intensity) s += l;
  return s;
}

RateModel RateModel::with_full_observation() const {
  return with_observation({d1, m1(), m2()});
}

RateModel RateModel::with_observation(ObservedCutoffs cutoffs) const {
  RateModel copy = *this;
  copy.observed = cutoffs;
  return copy;
}

ModelError::ModelError(std::vector<Diagnostic> diagnostics)
    : std::invalid_argument([&] {
        std::ostringstream os;
        os << "invalid model:";
        for (const auto& dg : diagnostics) os << "\n  " << dg.field << ": " << dg.message;
        return os.str();
      }()),
      diagnostics_(std::move(diagnostics)) {}

std::vector<Diagnostic> validate(const RateModel& m) {
  std::vector<Diagnostic> out;
  auto fail = [&out](std::string field, std::string msg) { out.push_back({std::move(field), std::move(msg)}); };

  if (m.n <= 0 || m.d <= 0) {
    fail("n/d", "block count and system dimension must be positive");
    return out;
  }
  if (m.hamiltonian.n() != m.n || m.hamiltonian.d() != m.d) {
    fail("hamiltonian", "expected n blocks of size d x d");
  } else {
    for (int i = 0; i < m.n; ++i) {
      const double asym = (m.hamiltonian[i] - m.hamiltonian[i].adjoint()).cwiseAbs().maxCoeff();
      if (asym > 1e-12) fail(indexed("hamiltonian", i), "block is not Hermitian");
    }
  }

  if (m.d1 < 0 || m.d1 > m.m1()) fail("d1", "diffusive diagonal count out of range");
  if (m.d2 < 0 || m.d2 > m.m2()) fail("d2", "diffusive coupling count out of range");

  for (int a = 0; a < m.m1(); ++a) {
    const auto& ch = m.diagonal[static_cast<std::size_t>(a)];
    const std::string field = indexed("diagonal", a) + (ch.name.empty() ? "" : " (" + ch.name + ")");
    if (ch.base.n() != m.n || ch.base.d() != m.d) {
      fail(field, "expected n blocks of size d x d");
      continue;
    }
    if (!ch.phase.empty()) {
      if (static_cast<int>(ch.phase.size()) != m.n) {
        fail(field, "phase modulation needs one function per block");
      } else {
        for (int j = 0; j < m.n; ++j)
          for (double t : {0.0, 0.37, 1.0})
            if (std::abs(std::abs(ch.factor(j, t)) - 1.0) > 1e-12)
              fail(indexed(field + " phase", j), "phase factor is not unit modulus");
      }
    }
    if (a >= m.d1 && !(ch.intensity > 0.0)) fail(field, "jump channel intensity must be positive");
  }

  for (int a = 0; a < m.m2(); ++a) {
    const auto& ch = m.coupling[static_cast<std::size_t>(a)];
    const std::string field = indexed("coupling", a) + (ch.name.empty() ? "" : " (" + ch.name + ")");
    if (ch.op.n() != m.n || ch.op.d() != m.d) {
      fail(field, "expected an n x n array of d x d matrices");
      continue;
    }
    if (a < m.d2) continue;
    if (static_cast<int>(ch.intensity.size()) != m.n) {
      fail(field, "jump coupling channel needs one intensity per source block");
      continue;
    }
    for (int k = 0; k < m.n; ++k) {
      const double l = ch.intensity[static_cast<std::size_t>(k)];
      if (l < 0.0 || !std::isfinite(l)) {
        fail(indexed(field + " intensity", k), "intensity must be non-negative");
      } else if (l == 0.0 && !ch.op.column_is_zero(k)) {
        fail(indexed(field + " intensity", k), "zero intensity requires a zero operator column");
      }
    }
  }

  const auto& o = m.observed;
  if (o.d1 < 0 || o.d1 > m.d1) fail("observed.d1", "must lie in [0, d1]");
  if (o.m1 < m.d1 || o.m1 > m.m1()) fail("observed.m1", "must lie in [d1, m1]");
  if (o.m2 < m.d2 || o.m2 > m.m2()) fail("observed.m2", "must lie in [d2, m2]");
  return out;
}

void require_valid(const RateModel& m) {
  auto diagnostics = validate(m);
  if (!diagnostics.empty()) throw ModelError(std::move(diagnostics));
}

AssembledGenerators assemble(const RateModel& m, double t) {
  AssembledGenerators g;
  g.K = BlockOperator(m.n, m.d);
  for (int j = 0; j < m.n; ++j) {
    Matrix& K = g.K[j];
    K = -kI * m.hamiltonian[j];
    for (const auto& ch : m.diagonal) K -= 0.5 * ch.base[j].adjoint() * ch.base[j];
    for (const auto& ch : m.coupling)
      for (int k = 0; k < m.n; ++k) K -= 0.5 * ch.op(k, j).adjoint() * ch.op(k, j);
  }
  g.V.reserve(m.diagonal.size());
  for (const auto& ch : m.diagonal) g.V.push_back(ch.at(t));
  g.S.reserve(m.coupling.size());
  for (const auto& ch : m.coupling) g.S.push_back(ch.op);

  for (int a = m.d1; a < m.m1(); ++a) g.lambda_total += m.diagonal[static_cast<std::size_t>(a)].intensity;
  for (int a = m.d2; a < m.m2(); ++a) {
    const double L = m.coupling[static_cast<std::size_t>(a)].total_intensity();
    g.Lambda.push_back(L);
    g.lambda_total += L;
  }
  return g;
}

BlockDensity rate_generator(const RateModel& m, const BlockDensity& tau, double t) {
  if (tau.n() != m.n || tau.d() != m.d) throw DimensionError("rate_generator: block shape mismatch");
  BlockDensity out(m.n, m.d);
  for (int i = 0; i < m.n; ++i) {
    Matrix& o = out[i];
    const Matrix& H = m.hamiltonian[i];
    o.noalias() = -kI * (H * tau[i] - tau[i] * H);
    for (const auto& ch : m.diagonal) add_dissipator(o, ch.at(i, t), tau[i]);
    for (const auto& ch : m.coupling) {
      for (int k = 0; k < m.n; ++k) {
        const Matrix& Rik = ch.op(i, k);
        o.noalias() += Rik * tau[k] * Rik.adjoint();
        const Matrix RdR = ch.op(k, i).adjoint() * ch.op(k, i);
        o.noalias() -= 0.5 * (RdR * tau[i] + tau[i] * RdR);
      }
    }
  }
  return out;
}

Matrix extended_generator(const RateModel& m, const Matrix& T, double t) {
  const int N = m.n * m.d;
  if (T.rows() != N || T.cols() != N) throw DimensionError("extended_generator: matrix shape mismatch");
  const Matrix H = m.hamiltonian.to_full();
  Matrix out = -kI * (H * T - T * H);
  for (const auto& ch : m.diagonal) add_dissipator(out, ch.at(t).to_full(), T);
  for (const auto& ch : m.coupling)
    for (int j = 0; j < m.n; ++j) add_dissipator(out, ch.op.column_to_full(j), T);
  return out;
}

Matrix tilde_generator(const RateModel& m, const Matrix& T, double t) {
  const int N = m.n * m.d;
  if (T.rows() != N || T.cols() != N) throw DimensionError("tilde_generator: matrix shape mismatch");
  const Matrix H = m.hamiltonian.to_full();
  Matrix out = -kI * (H * T - T * H);
  for (const auto& ch : m.diagonal)
    for (int i = 0; i < m.n; ++i) add_dissipator(out, embed(ch.at(i, t), i, i, m.n), T);
  for (const auto& ch : m.coupling)
    for (int i = 0; i < m.n; ++i)
      for (int j = 0; j < m.n; ++j) add_dissipator(out, embed(ch.op(i, j), i, j, m.n), T);
  return out;
}

Matrix vectorized_rate_generator(const RateModel& m) {
  const int dim = m.n * m.d * m.d;
  Matrix G(dim, dim);
  Vector e = Vector::Zero(dim);
  for (int c = 0; c < dim; ++c) {
    e.setZero();
    e[c] = 1.0;
    G.col(c) = rate_generator(m, BlockDensity::unvectorize(e, m.n, m.d)).vectorize();
  }
  return G;
}

Matrix vectorized_extended_generator(const RateModel& m, double t) {
  const int N = m.n * m.d;
  Matrix G(N * N, N * N);
  Matrix E = Matrix::Zero(N, N);
  for (int c = 0; c < N * N; ++c) {
    E.setZero();
    E(c % N, c / N) = 1.0;
    const Matrix r = extended_generator(m, E, t);
    G.col(c) = Eigen::Map<const Vector>(r.data(), N * N);
  }
  return G;
}

namespace ops {

Matrix sigma_minus() {
  Matrix s = Matrix::Zero(2, 2);
  s(1, 0) = 1.0;
  return s;
}

Matrix sigma_plus() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

Matrix sigma_z() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = -1.0;
  return s;
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

Matrix projector_excited() { return sigma_plus() * sigma_minus(); }
Matrix projector_ground() { return sigma_minus() * sigma_plus(); }

}  // namespace ops


RateKernel::RateKernel(const RateModel& m) : n_(m.n), d_(m.d) {
  const AssembledGenerators g = assemble(m);
  for (int j = 0; j < m.n; ++j) drift_.push_back(g.K[j]);
  for (const auto& ch : m.diagonal)
    for (int j = 0; j < m.n; ++j)
      if (!ch.base[j].isZero(0.0)) sandwiches_.push_back({j, j, ch.base[j]});
  for (const auto& ch : m.coupling)
    for (int i = 0; i < m.n; ++i)
      for (int k = 0; k < m.n; ++k)
        if (!ch.op(i, k).isZero(0.0)) sandwiches_.push_back({i, k, ch.op(i, k)});
}

void RateKernel::apply(const BlockDensity& tau, BlockDensity& out) const {
  for (int i = 0; i < n_; ++i) {
    out[i].noalias() = drift_[static_cast<std::size_t>(i)] * tau[i];
    out[i].noalias() += tau[i] * drift_[static_cast<std::size_t>(i)].adjoint();
  }
  for (const auto& s : sandwiches_) out[s.to].noalias() += s.op * tau[s.from] * s.op.adjoint();
}

BlockDensity RateKernel::apply(const BlockDensity& tau) const {
  if (tau.n() != n_ || tau.d() != d_) throw DimensionError("RateKernel::apply: block shape mismatch");
  BlockDensity out(n_, d_);
  apply(tau, out);
  return out;
}

}  // namespace lindrate
