#pragma once

// Lindblad rate models and the operators assembled from them.
//
// Channel layout (0-based internally):
//   diagonal[0 .. d1)      diffusive diagonal channels  L_alpha, noise W_alpha
//   diagonal[d1 .. m1)     jump diagonal channels, Poisson N_alpha of intensity lambda_alpha
//   coupling[0 .. d2)      diffusive coupling channels, noises W^k_alpha (never observable)
//   coupling[d2 .. m2)     jump coupling channels, Poisson N^k_alpha of intensity lambda^k_alpha
//
// Observed outputs are prefixes: W_alpha for alpha < observed.d1, N_beta for
// d1 <= beta < observed.m1, and M_gamma = sum_k N^k_gamma for d2 <= gamma < observed.m2.

#include <functional>
#include <string>
#include <vector>

#include "lindrate/blockalg.hpp"

namespace lindrate {

// Unit-modulus factor c(t) with L(t) = c(t) * base. For heterodyne detection
// c(t) = e^{i nu t}.
using PhaseFunction = std::function<cplx(double)>;

PhaseFunction heterodyne_phase(double nu);

struct DiagonalChannel {
  std::string name;
  BlockOperator base;
  // Empty, or one factor per block.
  std::vector<PhaseFunction> phase;
  // Only meaningful for jump channels.
  double intensity = 0.0;

  bool modulated() const { return !phase.empty(); }
  cplx factor(int block, double t) const;
  Matrix at(int block, double t) const;
  BlockOperator at(double t) const;
};

struct CouplingChannel {
  std::string name;
  CouplingOperator op;
  // lambda^k for each source block k; only meaningful for jump channels.
  std::vector<double> intensity;

  double total_intensity() const;  // Lambda = sum_k lambda^k
};

struct ObservedCutoffs {
  int d1 = 0;  // W_alpha observed for alpha < d1
  int m1 = 0;  // N_beta observed for model.d1 <= beta < m1
  int m2 = 0;  // M_gamma observed for model.d2 <= gamma < m2
};

struct RateModel {
  int n = 0;
  int d = 0;
  BlockOperator hamiltonian;
  std::vector<DiagonalChannel> diagonal;
  std::vector<CouplingChannel> coupling;
  int d1 = 0;
  int d2 = 0;
  ObservedCutoffs observed;

  int m1() const { return static_cast<int>(diagonal.size()); }
  int m2() const { return static_cast<int>(coupling.size()); }
  int jump_diagonal_count() const { return m1() - d1; }
  int jump_coupling_count() const { return m2() - d2; }

  // Everything observable is observed.
  RateModel with_full_observation() const;
  RateModel with_observation(ObservedCutoffs cutoffs) const;
};

struct Diagnostic {
  std::string field;
  std::string message;
};

// Empty iff every structural invariant holds.
std::vector<Diagnostic> validate(const RateModel& m);

class ModelError : public std::invalid_argument {
 public:
  explicit ModelError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

void require_valid(const RateModel& m);

struct AssembledGenerators {
  BlockOperator K;                    // drift blocks K^j
  std::vector<BlockOperator> V;       // V_alpha at the assembly time
  std::vector<CouplingOperator> S;    // S_alpha, column j is S^j_alpha
  std::vector<double> Lambda;         // summed intensities, jump coupling channels only
  double lambda_total = 0.0;          // sum lambda_alpha + sum sum lambda^j_alpha
};

AssembledGenerators assemble(const RateModel& m, double t = 0.0);

// Right-hand side K_i(tau_1, ..., tau_n) of the rate equation.
BlockDensity rate_generator(const RateModel& m, const BlockDensity& tau, double t = 0.0);

// Lindblad generator on the extended space with operators H, V_alpha, S^j_beta.
Matrix extended_generator(const RateModel& m, const Matrix& T, double t = 0.0);

// Lindblad generator built from every S^{ij}_alpha = R^{ij}_alpha (x) |e_i><e_j|
// separately (with the diagonal channels as R^{ii} = L^i).
Matrix tilde_generator(const RateModel& m, const Matrix& T, double t = 0.0);

// Matrix of rate_generator acting on BlockDensity::vectorize(), size n d^2.
Matrix vectorized_rate_generator(const RateModel& m);

// Matrix of extended_generator acting on the column-stacked full density, size (n d)^2.
Matrix vectorized_extended_generator(const RateModel& m, double t = 0.0);

// Named two-level operators. The excited state is (1, 0).
namespace ops {
Matrix sigma_minus();
Matrix sigma_plus();
Matrix sigma_z();
Matrix identity(int d);
Matrix projector_excited();  // P_+ = sigma_+ sigma_-
Matrix projector_ground();   // P_- = sigma_- sigma_+
}  // namespace ops


// Precomputed form of the rate generator for inner loops:
//   K_i(tau) = K^i tau_i + tau_i K^i* + sum_a L^i_a tau_i L^i_a* + sum_a sum_k R^{ik}_a tau_k R^{ik}_a*.
// The sandwich terms are invariant under the unit-modulus phases, so the
// unmodulated base operators are used.
class RateKernel {
 public:
  explicit RateKernel(const RateModel& m);
  void apply(const BlockDensity& tau, BlockDensity& out) const;
  BlockDensity apply(const BlockDensity& tau) const;

 private:
  struct Sandwich {
    int to;
    int from;
    Matrix op;
  };
  int n_;
  int d_;
  std::vector<Matrix> drift_;
  std::vector<Sandwich> sandwiches_;
};

}  // namespace lindrate
