#include "lindrate/csv.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lindrate/montecarlo.hpp"

namespace lindrate::csv {

namespace {

void header(std::ostream& os, const std::vector<std::string>& cols) {
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
}

std::ostream& num(std::ostream& os, double x) {
  os << std::setprecision(17) << x;
  return os;
}

void write_packed(std::ostream& os, const BlockDensity& x) {
  const Eigen::VectorXd v = pack(x);
  for (Eigen::Index i = 0; i < v.size(); ++i) num(os << ',', v[i]);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw std::runtime_error("record line " + std::to_string(line) + ": bad number '" + s + "'");
  return x;
}

int parse_channel(const std::string& col, char tag) {
  if (col.size() < 2 || col[0] != tag) return -1;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(col.data() + 1, col.data() + col.size(), v);
  if (ec != std::errc() || ptr != col.data() + col.size() || v < 1) return -1;
  return v - 1;
}

}  // namespace

std::vector<std::string> density_columns(int n, int d, const std::string& prefix) {
  std::vector<std::string> cols;
  for (int i = 0; i < n; ++i)
    for (int b = 0; b < d; ++b)
      for (int a = 0; a < d; ++a) {
        const std::string base = prefix + std::to_string(i + 1) + "_" + std::to_string(a + 1) + std::to_string(b + 1);
        cols.push_back(base + "_re");
        cols.push_back(base + "_im");
      }
  return cols;
}

void write_evolution(std::ostream& os, std::span<const double> times, std::span<const BlockDensity> states) {
  if (times.size() != states.size()) throw std::invalid_argument("write_evolution: size mismatch");
  if (states.empty()) return;
  std::vector<std::string> cols{"time"};
  for (auto& c : density_columns(states.front().n(), states.front().d())) cols.push_back(c);
  cols.emplace_back("total_trace");
  header(os, cols);
  for (std::size_t k = 0; k < times.size(); ++k) {
    num(os, times[k]);
    write_packed(os, states[k]);
    num(os << ',', states[k].total_trace().real()) << '\n';
  }
}

void write_unravel(std::ostream& os, const UnravelResult& result, bool with_p) {
  if (result.points.empty()) return;
  const int n = result.points.front().state.mean.n();
  const int d = result.points.front().state.mean.d();
  std::vector<std::string> cols{"time"};
  for (auto& c : density_columns(n, d)) cols.push_back(c);
  for (int i = 0; i < n; ++i) cols.push_back("sigma" + std::to_string(i + 1));
  if (with_p) {
    cols.emplace_back("p_mean");
    cols.emplace_back("p_se");
  }
  header(os, cols);
  for (const auto& pt : result.points) {
    num(os, pt.time);
    write_packed(os, pt.state.mean);
    for (double s : pt.state.sigma) num(os << ',', s);
    if (with_p) {
      num(os << ',', pt.p_mean);
      num(os << ',', pt.p_se);
    }
    os << '\n';
  }
}

namespace {

void write_path(std::ostream& os, const std::vector<double>& time, const std::vector<BlockVector>& states,
                const std::vector<double>* p) {
  if (states.empty()) return;
  const int n = states.front().n();
  const int d = states.front().d();
  std::vector<std::string> cols{"time"};
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) {
      const std::string base = "zeta" + std::to_string(i + 1) + "_" + std::to_string(a + 1);
      cols.push_back(base + "_re");
      cols.push_back(base + "_im");
    }
  if (p) cols.emplace_back("p");
  header(os, cols);
  const std::size_t offset = time.size() - states.size();
  for (std::size_t k = 0; k < states.size(); ++k) {
    num(os, time[offset + k]);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < d; ++a) {
        num(os << ',', states[k][i][a].real());
        num(os << ',', states[k][i][a].imag());
      }
    if (p) num(os << ',', (*p)[offset + k]);
    os << '\n';
  }
}

}  // namespace

void write_linear_path(std::ostream& os, const LinearTrajectory& traj) { write_path(os, traj.time, traj.zeta, &traj.p); }

void write_physical_path(std::ostream& os, const PhysicalTrajectory& traj) {
  write_path(os, traj.time, traj.psi, nullptr);
}

void write_jumps(std::ostream& os, std::span<const JumpEvent> jumps) {
  header(os, {"time", "kind", "channel", "source"});
  for (const auto& j : jumps) {
    num(os, j.time) << ',' << (j.coupling ? "coupling" : "diagonal") << ',' << j.channel + 1 << ',';
    if (j.coupling) os << j.source + 1;
    os << '\n';
  }
}

void write_record(std::ostream& os, const ObservedRecord& record) {
  std::vector<std::string> cols{"time"};
  for (int a : record.w_channels) cols.push_back("W" + std::to_string(a + 1));
  for (int b : record.n_channels) cols.push_back("N" + std::to_string(b + 1));
  for (int g : record.m_channels) cols.push_back("M" + std::to_string(g + 1));
  header(os, cols);
  std::vector<double> W(record.w_channels.size(), 0.0);
  std::vector<long> N(record.n_channels.size(), 0), M(record.m_channels.size(), 0);
  for (std::size_t k = 0; k < record.time.size(); ++k) {
    if (k > 0) {
      const auto& s = record.steps[k - 1];
      for (std::size_t a = 0; a < W.size(); ++a) W[a] += s.dW[a];
      for (std::size_t a = 0; a < N.size(); ++a) N[a] += s.dN[a];
      for (std::size_t a = 0; a < M.size(); ++a) M[a] += s.dM[a];
    }
    num(os, record.time[k]);
    for (double w : W) num(os << ',', w);
    for (long c : N) os << ',' << c;
    for (long c : M) os << ',' << c;
    os << '\n';
  }
}

ObservedRecord read_record(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("record: empty input");
  const auto cols = split(line);
  if (cols.empty() || cols[0] != "time") throw std::runtime_error("record line 1: first column must be 'time'");
  ObservedRecord r;
  enum Kind { w, n, m };
  std::vector<Kind> kinds;
  for (std::size_t c = 1; c < cols.size(); ++c) {
    int ch;
    if ((ch = parse_channel(cols[c], 'W')) >= 0) {
      if (!r.n_channels.empty() || !r.m_channels.empty())
        throw std::runtime_error("record line 1: W columns must come first");
      r.w_channels.push_back(ch);
      kinds.push_back(w);
    } else if ((ch = parse_channel(cols[c], 'N')) >= 0) {
      if (!r.m_channels.empty()) throw std::runtime_error("record line 1: N columns must precede M columns");
      r.n_channels.push_back(ch);
      kinds.push_back(n);
    } else if ((ch = parse_channel(cols[c], 'M')) >= 0) {
      r.m_channels.push_back(ch);
      kinds.push_back(m);
    } else {
      throw std::runtime_error("record line 1: unknown column '" + cols[c] + "'");
    }
  }
  std::vector<double> prev_w(r.w_channels.size(), 0.0);
  std::vector<long> prev_n(r.n_channels.size(), 0), prev_m(r.m_channels.size(), 0);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols.size())
      throw std::runtime_error("record line " + std::to_string(lineno) + ": expected " + std::to_string(cols.size()) +
                               " fields");
    const double t = parse_double(cells[0], lineno);
    std::vector<double> W;
    std::vector<long> N, M;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const double x = parse_double(cells[c], lineno);
      switch (kinds[c - 1]) {
        case w: W.push_back(x); break;
        case n: N.push_back(static_cast<long>(std::llround(x))); break;
        case m: M.push_back(static_cast<long>(std::llround(x))); break;
      }
    }
    if (r.time.empty()) {
      r.time.push_back(t);
    } else {
      if (!(t > r.time.back())) throw std::runtime_error("record line " + std::to_string(lineno) + ": time must increase");
      ObservedIncrements inc;
      for (std::size_t a = 0; a < W.size(); ++a) inc.dW.push_back(W[a] - prev_w[a]);
      for (std::size_t a = 0; a < N.size(); ++a) {
        const long dn = N[a] - prev_n[a];
        if (dn < 0) throw std::runtime_error("record line " + std::to_string(lineno) + ": counts must not decrease");
        inc.dN.push_back(static_cast<int>(dn));
      }
      for (std::size_t a = 0; a < M.size(); ++a) {
        const long dm = M[a] - prev_m[a];
        if (dm < 0) throw std::runtime_error("record line " + std::to_string(lineno) + ": counts must not decrease");
        inc.dM.push_back(static_cast<int>(dm));
      }
      r.time.push_back(t);
      r.steps.push_back(std::move(inc));
    }
    prev_w = W;
    prev_n = N;
    prev_m = M;
  }
  if (r.time.empty()) throw std::runtime_error("record: no data rows");
  return r;
}

void write_spectrum(std::ostream& os, std::span<const SpectrumRow> rows) {
  bool quad = false, mc = false;
  for (const auto& r : rows) {
    quad = quad || r.power_quadrature.has_value();
    mc = mc || r.power_mc.has_value();
  }
  std::vector<std::string> cols{"nu", "sigma_form_a", "sigma_form_b"};
  if (quad) cols.emplace_back("power_quadrature");
  if (mc) {
    cols.emplace_back("power_mc");
    cols.emplace_back("power_mc_se");
  }
  header(os, cols);
  for (const auto& r : rows) {
    num(os, r.nu);
    num(os << ',', r.form_a);
    num(os << ',', r.form_b);
    if (quad) {
      os << ',';
      if (r.power_quadrature) num(os, *r.power_quadrature);
    }
    if (mc) {
      os << ',';
      if (r.power_mc) num(os, *r.power_mc);
      os << ',';
      if (r.power_mc_se) num(os, *r.power_mc_se);
    }
    os << '\n';
  }
}

}  // namespace lindrate::csv
