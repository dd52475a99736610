#pragma once

// Independent reference computations and hand-rolled generators for tests.
// Nothing here calls the library's generator assembly or propagators.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lindrate/blockalg.hpp"
#include "lindrate/model.hpp"
#include "lindrate/twolevel.hpp"

namespace oracle {

using lindrate::BlockDensity;
using lindrate::BlockOperator;
using lindrate::BlockVector;
using lindrate::cplx;
using lindrate::CouplingOperator;
using lindrate::Matrix;
using lindrate::RateModel;
using lindrate::Vector;

// ---------------------------------------------------------------------------
// Generators

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return uniform() < p; }

  Matrix matrix(int d, double scale = 1.0) {
    Matrix m(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = scale * cplx(normal(), normal()) / std::sqrt(2.0);
    return m;
  }

  Matrix hermitian(int d, double scale = 1.0) {
    const Matrix a = matrix(d, scale);
    return 0.5 * (a + a.adjoint());
  }

  Vector vector(int d) {
    Vector v(d);
    for (int a = 0; a < d; ++a) v[a] = cplx(normal(), normal());
    return v;
  }

  BlockVector block_vector(int n, int d) {
    BlockVector v(n, d);
    for (int i = 0; i < n; ++i) v[i] = vector(d);
    return v;
  }

  // PSD blocks with unit total trace.
  BlockDensity density(int n, int d) {
    BlockDensity x(n, d);
    double tr = 0.0;
    for (int i = 0; i < n; ++i) {
      const Matrix a = matrix(d);
      x[i] = a * a.adjoint() * uniform(0.1, 1.0);
      tr += x[i].trace().real();
    }
    x *= 1.0 / tr;
    return x;
  }

  // Arbitrary complex blocks.
  BlockDensity blocks(int n, int d) {
    BlockDensity x(n, d);
    for (int i = 0; i < n; ++i) x[i] = matrix(d);
    return x;
  }

  // Full (n d) x (n d) density with nonzero off-diagonal blocks.
  Matrix full_density(int nd) {
    const Matrix a = matrix(nd);
    Matrix rho = a * a.adjoint();
    return rho / rho.trace();
  }

  // Valid random model; every channel type is present with the given
  // probabilities. Operators are O(1).
  RateModel model(int n, int d, bool with_diffusive_coupling = true, bool with_phases = true) {
    RateModel m;
    m.n = n;
    m.d = d;
    std::vector<Matrix> h;
    for (int i = 0; i < n; ++i) h.push_back(hermitian(d));
    m.hamiltonian = BlockOperator(h);
    const int d1 = integer(0, 2);
    const int jd = integer(0, 2);
    for (int a = 0; a < d1 + jd; ++a) {
      lindrate::DiagonalChannel ch;
      std::vector<Matrix> ls;
      for (int i = 0; i < n; ++i) ls.push_back(matrix(d, 0.7));
      ch.base = BlockOperator(ls);
      if (with_phases && a < d1 && coin()) ch.phase.assign(static_cast<std::size_t>(n), lindrate::heterodyne_phase(uniform(-2, 2)));
      if (a >= d1) ch.intensity = uniform(0.2, 2.0);
      m.diagonal.push_back(ch);
    }
    m.d1 = d1;
    const int d2 = with_diffusive_coupling ? integer(0, 1) : 0;
    const int jc = integer(1, 2);
    for (int a = 0; a < d2 + jc; ++a) {
      lindrate::CouplingChannel ch;
      ch.op = CouplingOperator(n, d);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (coin(0.6)) ch.op(i, j) = matrix(d, 0.6);
      if (a >= d2) {
        for (int k = 0; k < n; ++k) ch.intensity.push_back(ch.op.column_is_zero(k) ? (coin() ? 0.0 : 0.5) : uniform(0.2, 2.0));
      }
      m.coupling.push_back(ch);
    }
    m.d2 = d2;
    m.observed = {m.d1, m.m1(), m.m2()};
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Rate generator written out term by term:
//   K_i(tau) = -i[H^i, tau_i] + sum_a (L^i tau_i L^i* - 1/2 {L^i* L^i, tau_i})
//            + sum_a sum_j (R^{ij} tau_j R^{ij}* - 1/2 {R^{ji}* R^{ji}, tau_i})
inline BlockDensity rate_generator(const RateModel& m, const BlockDensity& tau) {
  BlockDensity out(m.n, m.d);
  const cplx I(0.0, 1.0);
  for (int i = 0; i < m.n; ++i) {
    Matrix r = -I * (m.hamiltonian[i] * tau[i] - tau[i] * m.hamiltonian[i]);
    for (const auto& ch : m.diagonal) {
      const Matrix& L = ch.base[i];
      const Matrix LL = L.adjoint() * L;
      r += L * tau[i] * L.adjoint() - 0.5 * (LL * tau[i] + tau[i] * LL);
    }
    for (const auto& ch : m.coupling) {
      for (int j = 0; j < m.n; ++j) {
        const Matrix& Rij = ch.op(i, j);
        r += Rij * tau[j] * Rij.adjoint();
        const Matrix& Rji = ch.op(j, i);
        const Matrix RR = Rji.adjoint() * Rji;
        r -= 0.5 * (RR * tau[i] + tau[i] * RR);
      }
    }
    out[i] = r;
  }
  return out;
}

// Matrix of rate_generator on BlockDensity::vectorize() coordinates, built
// column by column from basis elements.
inline Matrix vectorized_generator(const RateModel& m) {
  const int N = m.n * m.d * m.d;
  Matrix G(N, N);
  for (int c = 0; c < N; ++c) {
    Vector e = Vector::Zero(N);
    e[c] = 1.0;
    G.col(c) = oracle::rate_generator(m, BlockDensity::unvectorize(e, m.n, m.d)).vectorize();
  }
  return G;
}

// Evolution with observed jump gains removed: the unnormalized state on the
// event of no observed jumps. Observed diagonal jump channels lose their
// sandwich L tau L*, observed coupling channels lose sum_k R^{jk} tau_k R^{jk}*.
inline Matrix vectorized_no_jump_generator(const RateModel& m) {
  const int N = m.n * m.d * m.d;
  Matrix G = vectorized_generator(m);
  for (int c = 0; c < N; ++c) {
    Vector e = Vector::Zero(N);
    e[c] = 1.0;
    const BlockDensity tau = BlockDensity::unvectorize(e, m.n, m.d);
    BlockDensity gain(m.n, m.d);
    for (int b = m.d1; b < m.observed.m1; ++b) {
      const auto& ch = m.diagonal[static_cast<std::size_t>(b)];
      for (int i = 0; i < m.n; ++i) gain[i] += ch.base[i] * tau[i] * ch.base[i].adjoint();
    }
    for (int g = m.d2; g < m.observed.m2; ++g) {
      const auto& ch = m.coupling[static_cast<std::size_t>(g)];
      for (int i = 0; i < m.n; ++i)
        for (int k = 0; k < m.n; ++k) gain[i] += ch.op(i, k) * tau[k] * ch.op(i, k).adjoint();
    }
    G.col(c) -= gain.vectorize();
  }
  return G;
}

inline BlockDensity propagate(const Matrix& G, double t, const BlockDensity& x) {
  const Matrix P = (t * G).exp();
  return BlockDensity::unvectorize(P * x.vectorize(), x.n(), x.d());
}

// ---------------------------------------------------------------------------
// Four-state chain over (1+, 1-, 2+, 2-) with the transition rates
//   1+ -> 1- gamma0, 1+ -> 2- gamma1, 1+ -> 2+ gamma0 kappa,
//   2- -> 1+ gamma2, 2+ -> 2- gamma0, 1- -> 2- gamma0 kappa.
// Column c holds the rates out of state c.
inline Eigen::Matrix4d chain_generator(const lindrate::twolevel::TwoLevelParams& p) {
  enum { up1 = 0, dn1 = 1, up2 = 2, dn2 = 3 };
  Eigen::Matrix4d Q = Eigen::Matrix4d::Zero();
  auto rate = [&](int from, int to, double r) {
    Q(to, from) += r;
    Q(from, from) -= r;
  };
  rate(up1, dn1, p.gamma0);
  rate(up1, dn2, p.gamma1);
  rate(up1, up2, p.gamma0 * p.kappa);
  rate(dn2, up1, p.gamma2);
  rate(up2, dn2, p.gamma0);
  rate(dn1, dn2, p.gamma0 * p.kappa);
  return Q;
}

// ---------------------------------------------------------------------------
// Heterodyne spectrum from the resolvent of the rate generator:
//   Sigma(nu) = (gamma0 / pi) Re sum_i Tr sigma_- [(s - G)^{-1} (eta sigma_+)]_i,  s = k/2 - i nu,
// with eta the stationary state.
inline double resolvent_spectrum(const lindrate::twolevel::TwoLevelParams& p, double nu) {
  const RateModel m = lindrate::twolevel::build_model(p);
  const Matrix G = vectorized_generator(m);
  // Stationary state from the null space of G.
  Eigen::JacobiSVD<Matrix> svd(G, Eigen::ComputeFullV);
  const Vector null = svd.matrixV().col(G.cols() - 1);
  BlockDensity eta = BlockDensity::unvectorize(null, m.n, m.d);
  eta *= 1.0 / eta.total_trace();
  Matrix sm = Matrix::Zero(2, 2);
  sm(1, 0) = 1.0;
  const Matrix sp = sm.adjoint();
  BlockDensity x(2, 2);
  for (int i = 0; i < 2; ++i) x[i] = eta[i] * sp;
  const cplx s(p.k / 2.0, -nu);
  const Matrix A = s * Matrix::Identity(G.rows(), G.cols()) - G;
  const BlockDensity y = BlockDensity::unvectorize(A.partialPivLu().solve(x.vectorize()), 2, 2);
  const cplx tr = (sm * y[0]).trace() + (sm * y[1]).trace();
  return p.gamma0 / std::numbers::pi * tr.real();
}

// Random admissible two-level parameters.
inline lindrate::twolevel::TwoLevelParams random_params(Gen& g) {
  lindrate::twolevel::TwoLevelParams p;
  p.omega1 = g.uniform(0.2, 3.0);
  p.omega2 = g.uniform(0.2, 3.0);
  p.gamma0 = g.uniform(0.1, 2.0);
  p.gamma1 = g.uniform(0.05, 2.0);
  p.gamma2 = g.uniform(0.05, 2.0);
  p.kappa = g.uniform(0.01, 2.0);
  p.epsilon = g.uniform(0.1, 1.0);
  p.k = g.uniform(0.05, 1.0);
  p.nu = p.omega1;
  p.reset_intensities();
  return p;
}

}  // namespace oracle
