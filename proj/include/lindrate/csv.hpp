#pragma once

// CSV artifacts: evolutions, trajectory dumps with jump sidecars, observed
// records (exportable and replayable) and spectra.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lindrate/blockalg.hpp"
#include "lindrate/model.hpp"
#include "lindrate/sde_linear.hpp"
#include "lindrate/sde_nonlinear.hpp"
#include "lindrate/sme.hpp"

namespace lindrate::csv {

// Column names eta<i>_<a><b>_re / _im for block i, row a, column b (1-based).
std::vector<std::string> density_columns(int n, int d, const std::string& prefix = "eta");

// time, packed blocks, total trace.
void write_evolution(std::ostream& os, std::span<const double> times, std::span<const BlockDensity> states);

// time, mean blocks, per-block sigma, optional p mean and se.
void write_unravel(std::ostream& os, const UnravelResult& result, bool with_p);

// time, zeta<i>_<a>_re / _im, p.
void write_linear_path(std::ostream& os, const LinearTrajectory& traj);
void write_physical_path(std::ostream& os, const PhysicalTrajectory& traj);
// time, kind (diagonal or coupling), channel (1-based), source block (1-based, empty for diagonal).
void write_jumps(std::ostream& os, std::span<const JumpEvent> jumps);

// time, W<alpha>, N<beta>, M<gamma>, all cumulative, 1-based absolute channel
// numbers in the headers.
void write_record(std::ostream& os, const ObservedRecord& record);
// Inverse of write_record. Throws std::runtime_error on malformed input.
ObservedRecord read_record(std::istream& is);

struct SpectrumRow {
  double nu = 0.0;
  double form_a = 0.0;
  double form_b = 0.0;
  std::optional<double> power_quadrature;
  std::optional<double> power_mc;
  std::optional<double> power_mc_se;
};

void write_spectrum(std::ostream& os, std::span<const SpectrumRow> rows);

}  // namespace lindrate::csv
