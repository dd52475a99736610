#include "lindrate/master.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace lindrate {

namespace {

void check_grid(std::span<const double> grid) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(grid[k]) || grid[k] < 0.0) throw std::invalid_argument("evolve: grid times must be finite and >= 0");
    if (k > 0 && grid[k] < grid[k - 1]) throw std::invalid_argument("evolve: grid must be non-decreasing");
  }
}

// x <- x + a * y
void axpy(BlockDensity& x, double a, const BlockDensity& y) {
  for (int j = 0; j < x.n(); ++j) x[j] += a * y[j];
}

class Rk4 {
 public:
  explicit Rk4(const RateModel& m) : kernel_(m), k1_(m.n, m.d), k2_(m.n, m.d), k3_(m.n, m.d), k4_(m.n, m.d), tmp_(m.n, m.d) {}

  void step(BlockDensity& y, double h) {
    kernel_.apply(y, k1_);
    tmp_ = y;
    axpy(tmp_, 0.5 * h, k1_);
    kernel_.apply(tmp_, k2_);
    tmp_ = y;
    axpy(tmp_, 0.5 * h, k2_);
    kernel_.apply(tmp_, k3_);
    tmp_ = y;
    axpy(tmp_, h, k3_);
    kernel_.apply(tmp_, k4_);
    axpy(y, h / 6.0, k1_);
    axpy(y, h / 3.0, k2_);
    axpy(y, h / 3.0, k3_);
    axpy(y, h / 6.0, k4_);
  }

 private:
  RateKernel kernel_;
  BlockDensity k1_, k2_, k3_, k4_, tmp_;
};

// Dormand-Prince 5(4) on the vectorized state.
class DormandPrince {
 public:
  DormandPrince(const RateModel& m, const EvolveOptions& o) : G_(vectorized_rate_generator(m)), opt_(o) {}

  // Advances y from t0 to t1; h carries the step-size guess across calls.
  void advance(Vector& y, double t0, double t1, double& h) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2, (void)c3, (void)c4, (void)c5;
    double t = t0;
    while (t < t1) {
      h = std::min(h, t1 - t);
      if (h < opt_.min_step) throw NumericalError("evolve: adaptive step size underflow");
      const Vector k1 = G_ * y;
      const Vector k2 = G_ * (y + h * a21 * k1);
      const Vector k3 = G_ * (y + h * (a31 * k1 + a32 * k2));
      const Vector k4 = G_ * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Vector k5 = G_ * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Vector k6 = G_ * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vector y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vector k7 = G_ * y5;
      const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double norm = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
        norm = std::max(norm, std::abs(err[i]) / scale);
      }
      if (norm <= 1.0) {
        t += h;
        y = y5;
      }
      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      h *= factor;
    }
  }

 private:
  Matrix G_;
  EvolveOptions opt_;
};

}  // namespace

double max_rate(const RateModel& m) {
  const Matrix G = vectorized_rate_generator(m);
  return G.cwiseAbs().rowwise().sum().maxCoeff();
}

double default_step(const RateModel& m) {
  const double r = max_rate(m);
  return r > 0.0 ? 1e-3 / r : 1e-3;
}

std::vector<BlockDensity> evolve(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                                 const EvolveOptions& options) {
  if (eta0.n() != m.n || eta0.d() != m.d) throw DimensionError("evolve: initial state shape mismatch");
  check_grid(grid);
  std::vector<BlockDensity> out;
  out.reserve(grid.size());

  switch (options.method) {
    case EvolveMethod::rk4: {
      const double dt = options.dt > 0.0 ? options.dt : default_step(m);
      Rk4 rk(m);
      BlockDensity y = eta0;
      double t = 0.0;
      for (double target : grid) {
        const double span = target - t;
        if (span > 0.0) {
          const auto steps = static_cast<long>(std::ceil(span / dt - 1e-9));
          const double h = span / static_cast<double>(steps);
          for (long s = 0; s < steps; ++s) rk.step(y, h);
        }
        t = target;
        out.push_back(y);
      }
      break;
    }
    case EvolveMethod::adaptive: {
      DormandPrince dp(m, options);
      Vector y = eta0.vectorize();
      double h = options.dt > 0.0 ? options.dt : 100.0 * default_step(m);
      double t = 0.0;
      for (double target : grid) {
        if (target > t) dp.advance(y, t, target, h);
        t = target;
        out.push_back(BlockDensity::unvectorize(y, m.n, m.d));
      }
      break;
    }
    case EvolveMethod::expm: {
      const Propagator prop(m);
      for (double target : grid) out.push_back(prop.apply(target, eta0));
      break;
    }
  }
  return out;
}

Propagator::Propagator(const RateModel& m) : n_(m.n), d_(m.d), generator_(vectorized_rate_generator(m)) {}

Matrix Propagator::matrix(double t) const { return (t * generator_).exp(); }

BlockDensity Propagator::apply(double t, const BlockDensity& tau) const {
  if (tau.n() != n_ || tau.d() != d_) throw DimensionError("Propagator::apply: shape mismatch");
  return BlockDensity::unvectorize(matrix(t) * tau.vectorize(), n_, d_);
}

BlockDensity equilibrium(const RateModel& m) {
  const Matrix G = vectorized_rate_generator(m);
  Eigen::JacobiSVD<Matrix> svd(G, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Eigen::Index k = s.size();
  if (k >= 2 && !(s[k - 2] > 1e-8 * s[0])) {
    std::ostringstream os;
    os << "equilibrium: null space is not one-dimensional (second-smallest singular value " << s[k - 2]
       << ", largest " << s[0] << ")";
    throw DegenerateNullSpace(os.str());
  }
  BlockDensity eta = BlockDensity::unvectorize(svd.matrixV().col(k - 1), m.n, m.d);
  const cplx tr = eta.total_trace();
  if (std::abs(tr) < 1e-14) throw DegenerateNullSpace("equilibrium: stationary solution is traceless");
  eta *= 1.0 / tr;
  for (int j = 0; j < eta.n(); ++j) eta[j] = 0.5 * (eta[j] + eta[j].adjoint()).eval();
  return eta;
}

RealMatrix classical_reduction(const RateModel& m) {
  const int N = m.n * m.d;
  RealMatrix Q = RealMatrix::Zero(N, N);
  const RateKernel kernel(m);
  BlockDensity tau(m.n, m.d);
  for (int k = 0; k < m.n; ++k) {
    for (int a = 0; a < m.d; ++a) {
      for (int b = 0; b < m.d; ++b) {
        tau[k].setZero();
        tau[k](a, b) = 1.0;
        const BlockDensity r = kernel.apply(tau);
        for (int i = 0; i < m.n; ++i) {
          for (int x = 0; x < m.d; ++x) {
            for (int y = 0; y < m.d; ++y) {
              const cplx v = r[i](x, y);
              const bool population_in = (a == b);
              const bool population_out = (x == y);
              if (population_in && population_out) {
                if (std::abs(v.imag()) > 1e-12) throw std::invalid_argument("classical_reduction: complex population rate");
                Q(i * m.d + x, k * m.d + a) = v.real();
              } else if (population_in != population_out && std::abs(v) > 1e-12) {
                throw std::invalid_argument("classical_reduction: populations and coherences do not decouple");
              }
            }
          }
        }
        tau[k].setZero();
      }
    }
  }
  return Q;
}

}  // namespace lindrate
