#pragma once

// Observed outputs, the linear stochastic master equation for sigma under Q,
// the a posteriori states rho under the physical measure, and instruments.
//
// Only W_alpha (alpha < observed.d1), N_beta (d1 <= beta < observed.m1) and
// the summed counts M_gamma = sum_k N^k_gamma (d2 <= gamma < observed.m2) are
// ever part of a record; W^k_alpha and the unsummed N^k_gamma are not
// representable.

#include <functional>
#include <span>
#include <vector>

#include "lindrate/blockalg.hpp"
#include "lindrate/model.hpp"
#include "lindrate/montecarlo.hpp"
#include "lindrate/sde_linear.hpp"
#include "lindrate/sde_nonlinear.hpp"

namespace lindrate {

struct ObservedIncrements {
  std::vector<double> dW;  // index alpha
  std::vector<int> dN;     // index beta - d1
  std::vector<int> dM;     // index gamma - d2

  void resize(const RateModel& m);
  bool any_jump() const;
};

struct ObservedRecord {
  // Absolute channel indices of the columns.
  std::vector<int> w_channels;
  std::vector<int> n_channels;
  std::vector<int> m_channels;
  std::vector<double> time;               // t_0 = 0, ..., t_K
  std::vector<ObservedIncrements> steps;  // step k covers [t_k, t_{k+1})

  static ObservedRecord empty_for(const RateModel& m);
  bool matches(const RateModel& m) const;
  // Cumulative outputs at t_k.
  std::vector<double> W_at(std::size_t k) const;
  std::vector<int> N_at(std::size_t k) const;
  std::vector<int> M_at(std::size_t k) const;
  int total_jumps() const;
};

// Conditional expectations given the record: m_alpha, J^1_beta and J^2_gamma
// at rho(t-). Also valid for unnormalized sigma (values scale with the trace).
struct FilterSignals {
  std::vector<double> m;
  std::vector<double> J1;
  std::vector<double> J2;
};

FilterSignals compute_filter_signals(const RateModel& m, const BlockDensity& rho, double t);

// One Euler step of the linear equation for sigma over [t, t + dt), driven by
// the observed outputs. On a jump step sigma is replaced by the jump image of
// sigma(t-) divided by lambda (resp. Lambda).
class LinearSmeStepper {
 public:
  LinearSmeStepper(const RateModel& m, double dt);
  void step(BlockDensity& sigma, double t, const ObservedIncrements& outputs) const;

 private:
  const RateModel* m_;
  double dt_;
  RateKernel kernel_;
  AssembledGenerators g_;
  mutable BlockDensity drift_;
  mutable BlockDensity work_;
};

BlockDensity step_linear_sme(const RateModel& m, const BlockDensity& sigma, double t, double dt,
                             const ObservedIncrements& outputs);

// One Euler step of the nonlinear equation for rho, driven by innovations
// dW-hat and the observed jumps; renormalized to unit total trace. Throws
// NumericalError if a jump arrives while its conditional intensity is below
// 1e-14.
class NonlinearSmeStepper {
 public:
  NonlinearSmeStepper(const RateModel& m, double dt);
  void step(BlockDensity& rho, double t, const ObservedIncrements& innovations) const;
  void step(BlockDensity& rho, double t, const ObservedIncrements& innovations, const FilterSignals& signals) const;

 private:
  const RateModel* m_;
  double dt_;
  RateKernel kernel_;
  mutable BlockDensity drift_;
  mutable BlockDensity work_;
};

BlockDensity step_nonlinear_sme(const RateModel& m, const BlockDensity& rho, double t, double dt,
                                const ObservedIncrements& innovations);

struct ConditionalState {
  std::vector<double> time;
  std::vector<BlockDensity> sigma;  // linear equation only
  std::vector<double> p;            // p_G = total trace of sigma; linear equation only
  std::vector<BlockDensity> rho;    // a posteriori state
};

enum class Retain {
  final_state,  // last state only, no record
  record,       // last state and the full record
  full,         // every state and the full record
};

struct SmeRun {
  ConditionalState state;
  ObservedRecord record;
};

// Forward simulation under Q: W standard, N_beta and M_gamma Poisson with
// intensities lambda_beta and Lambda_gamma.
SmeRun simulate_linear_sme(const RateModel& m, const BlockDensity& eta0, double t, double dt, RandomStream& rng,
                           Retain retain = Retain::full);

// Forward simulation under the physical measure: innovations standard, jumps
// with the conditional intensities J at rho(t-). The recorded outputs are
// dW = dW-hat + m dt.
SmeRun simulate_nonlinear_sme(const RateModel& m, const BlockDensity& eta0, double t, double dt, RandomStream& rng,
                              Retain retain = Retain::full);

// Deterministic replays of a record.
ConditionalState filter_linear(const RateModel& m, const BlockDensity& eta0, const ObservedRecord& record);
ConditionalState filter_nonlinear(const RateModel& m, const BlockDensity& eta0, const ObservedRecord& record);

// Observed part of a retained physical trajectory.
ObservedRecord extract_record(const RateModel& m, const PhysicalTrajectory& traj);

// Mean of sigma(t) under Q (with the mean of p_G) or of rho(t) under P.
UnravelResult average_linear_sme(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                                 const McOptions& options);
UnravelResult average_nonlinear_sme(const RateModel& m, const BlockDensity& eta0, std::span<const double> grid,
                                    const McOptions& options);

using EventPredicate = std::function<bool(const ObservedRecord&)>;

struct InstrumentEstimate {
  BlockEstimate value;  // E_Q[1_F sigma(t)]
  double probability = 0.0;  // its total trace
  double probability_se = 0.0;
};

// Monte Carlo estimate of the instrument I_t(F)[eta0] from linear SME paths
// under Q.
InstrumentEstimate instrument_statistic(const RateModel& m, const BlockDensity& eta0, double t,
                                        const McOptions& options, const EventPredicate& F);

// P^t(F) estimated directly as the frequency of F under the physical measure.
struct ProbabilityEstimate {
  double mean = 0.0;
  double se = 0.0;
};
ProbabilityEstimate event_probability(const RateModel& m, const BlockDensity& eta0, double t,
                                      const McOptions& options, const EventPredicate& F);

EventPredicate no_observed_jumps();

}  // namespace lindrate
