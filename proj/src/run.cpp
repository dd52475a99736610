#include "lindrate/run.hpp"

#include <chrono>
#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lindrate/csv.hpp"
#include "lindrate/master.hpp"
#include "lindrate/model_io.hpp"
#include "lindrate/montecarlo.hpp"
#include "lindrate/sde_linear.hpp"
#include "lindrate/sde_nonlinear.hpp"
#include "lindrate/sme.hpp"

namespace lindrate {

using nlohmann::json;

namespace {

const std::pair<Method, const char*> kMethods[] = {
    {Method::ode, "ode"},
    {Method::linear_sse, "linear-sse"},
    {Method::nonlinear_sse, "nonlinear-sse"},
    {Method::linear_sme, "linear-sme"},
    {Method::nonlinear_sme, "nonlinear-sme"},
    {Method::spectrum, "spectrum"},
    {Method::equilibrium, "equilibrium"},
};

const std::pair<InitialState, const char*> kInitial[] = {
    {InitialState::equilibrium, "equilibrium"},
    {InitialState::uniform, "uniform"},
    {InitialState::first, "first"},
};

bool is_builtin(const RunConfig& c) { return c.model == "twolevel"; }

json matrix_json(const Matrix& x) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < x.cols(); ++c) row.push_back({x(r, c).real(), x(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

json density_json(const BlockDensity& x) {
  json blocks = json::array();
  for (int i = 0; i < x.n(); ++i) blocks.push_back(matrix_json(x[i]));
  return blocks;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

// Output grid on the step lattice of [0, t].
std::vector<double> lattice_grid(double t, double dt, std::size_t points) {
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
  const double h = t / static_cast<double>(steps);
  std::vector<double> grid;
  for (std::size_t q = 0; q < points; ++q) {
    const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(steps * q) / static_cast<double>(points - 1)));
    const double time = q + 1 == points ? t : static_cast<double>(k) * h;
    if (grid.empty() || time > grid.back()) grid.push_back(time);
  }
  return grid;
}

std::vector<double> positive_grid(std::vector<double> grid) {
  if (!grid.empty() && grid.front() == 0.0) grid.erase(grid.begin());
  return grid;
}

BlockDensity initial_state(const RateModel& m, InitialState s) {
  switch (s) {
    case InitialState::equilibrium:
      return equilibrium(m);
    case InitialState::uniform: {
      BlockDensity x(m.n, m.d);
      for (int i = 0; i < m.n; ++i) x[i] = Matrix::Identity(m.d, m.d) / static_cast<double>(m.n * m.d);
      return x;
    }
    case InitialState::first: {
      BlockDensity x(m.n, m.d);
      x[0](0, 0) = 1.0;
      return x;
    }
  }
  throw ConfigError("unknown initial state");
}

struct Check {
  std::string name;
  double measured;
  double tolerance;
  bool pass() const { return std::isfinite(measured) && measured <= tolerance; }
};

json checks_json(const std::vector<Check>& checks, bool& all) {
  json out = json::array();
  for (const auto& c : checks) {
    all = all && c.pass();
    out.push_back({{"check", c.name}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"pass", c.pass()}});
  }
  return out;
}

// Per-block trace distance of an estimate to a reference, against 3 sigma.
void compare_blocks(const BlockEstimate& est, const BlockDensity& ref, const std::string& label,
                    std::vector<Check>& checks, json& summary) {
  json blocks = json::array();
  for (int i = 0; i < ref.n(); ++i) {
    const double dist = trace_norm(Matrix(est.mean[i] - ref[i]));
    blocks.push_back({{"block", i + 1}, {"trace_distance", dist}, {"sigma", est.sigma[static_cast<std::size_t>(i)]}});
    checks.push_back({label + " block " + std::to_string(i + 1) + " trace distance to ode", dist,
                      3.0 * est.sigma[static_cast<std::size_t>(i)]});
  }
  summary["distance_to_ode"] = blocks;
}

McOptions mc_options(const RunConfig& c) { return {c.dt, c.ntraj, c.seed, c.workers}; }

json run_ode(const RunConfig& c, const RateModel& m, const BlockDensity& eta0, std::vector<Check>& checks) {
  const auto grid = lattice_grid(c.t, c.dt, std::max<std::size_t>(c.points, 2));
  const auto states = evolve(m, eta0, grid);
  {
    auto os = open_out(c.out / "evolution.csv");
    csv::write_evolution(os, grid, states);
  }
  double drift = 0.0, min_eig = std::numeric_limits<double>::infinity();
  const double tr0 = eta0.total_trace().real();
  for (const auto& s : states) {
    drift = std::max(drift, std::abs(s.total_trace().real() - tr0));
    min_eig = std::min(min_eig, s.min_eigenvalue());
  }
  json out{{"final", density_json(states.back())},
           {"total_trace_drift", drift},
           {"min_block_eigenvalue", min_eig},
           {"artifacts", {"evolution.csv"}}};
  if (c.verify) {
    EvolveOptions o;
    o.method = EvolveMethod::expm;
    const auto exact = evolve(m, eta0, grid, o);
    double gap = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) gap = std::max(gap, trace_norm(states[k] - exact[k]));
    checks.push_back({"rk4 vs matrix exponential, max trace distance", gap, 1e-8});
    checks.push_back({"total trace drift", drift, 1e-9});
    checks.push_back({"negative block eigenvalue", std::max(0.0, -min_eig), 1e-8});
  }
  return out;
}

json unravel_json(const UnravelResult& r, bool with_p) {
  const auto& last = r.points.back();
  json out{{"dt_used", r.dt}, {"ntraj", r.ntraj}, {"final_mean", density_json(last.state.mean)}};
  out["final_sigma"] = last.state.sigma;
  out["aggregate_variance"] = last.state.aggregate_variance;
  if (with_p) {
    out["p_mean"] = last.p_mean;
    out["p_se"] = last.p_se;
  }
  return out;
}

void verify_unravel(const RunConfig& c, const RateModel& m, const BlockDensity& eta0, const UnravelResult& r,
                    bool with_p, const std::string& label, std::vector<Check>& checks, json& out) {
  if (!c.verify) return;
  EvolveOptions o;
  o.method = EvolveMethod::expm;
  const double grid[] = {r.points.back().time};
  const BlockDensity ref = evolve(m, eta0, grid, o).back();
  compare_blocks(r.points.back().state, ref, label, checks, out);
  if (with_p) checks.push_back({label + " |mean p - 1|", std::abs(r.points.back().p_mean - 1.0), 3.0 * r.points.back().p_se});
}

json run_linear_sse(const RunConfig& c, const RateModel& m, const BlockDensity& eta0, std::vector<Check>& checks) {
  const auto grid = positive_grid(lattice_grid(c.t, c.dt, std::max<std::size_t>(c.points, 2)));
  const UnravelResult r = unravel_weighted(m, eta0, grid, mc_options(c));
  {
    auto os = open_out(c.out / "unravel.csv");
    csv::write_unravel(os, r, true);
  }
  json out = unravel_json(r, true);
  json artifacts{"unravel.csv"};
  if (c.dump_paths) {
    const InitialSampler sampler(eta0);
    for (std::size_t i = 0; i < std::min(c.dump_count, c.ntraj); ++i) {
      RandomStream rng(c.seed, i);
      const BlockVector zeta0 = sampler.sample(rng);
      const LinearTrajectory traj = simulate_linear(m, zeta0, c.t, c.dt, rng, true);
      const std::string base = "paths/linear_" + std::to_string(i);
      auto os = open_out(c.out / (base + ".csv"));
      csv::write_linear_path(os, traj);
      auto js = open_out(c.out / (base + "_jumps.csv"));
      csv::write_jumps(js, traj.jumps);
      artifacts.push_back(base + ".csv");
      artifacts.push_back(base + "_jumps.csv");
    }
  }
  out["artifacts"] = artifacts;
  verify_unravel(c, m, eta0, r, true, "linear sse", checks, out);
  return out;
}

json run_nonlinear_sse(const RunConfig& c, const RateModel& m, const BlockDensity& eta0, std::vector<Check>& checks) {
  const auto grid = positive_grid(lattice_grid(c.t, c.dt, std::max<std::size_t>(c.points, 2)));
  const UnravelResult r = unravel_normalized(m, eta0, grid, mc_options(c));
  {
    auto os = open_out(c.out / "unravel.csv");
    csv::write_unravel(os, r, false);
  }
  json out = unravel_json(r, false);
  json artifacts{"unravel.csv"};
  if (c.dump_paths) {
    const InitialSampler sampler(eta0);
    for (std::size_t i = 0; i < std::min(c.dump_count, c.ntraj); ++i) {
      RandomStream rng(c.seed, i);
      const BlockVector psi0 = sampler.sample(rng);
      const PhysicalTrajectory traj = simulate_physical(m, psi0, c.t, c.dt, rng, true);
      const std::string base = "paths/nonlinear_" + std::to_string(i);
      auto os = open_out(c.out / (base + ".csv"));
      csv::write_physical_path(os, traj);
      auto js = open_out(c.out / (base + "_jumps.csv"));
      csv::write_jumps(js, traj.jumps);
      auto rs = open_out(c.out / (base + "_record.csv"));
      csv::write_record(rs, extract_record(m, traj));
      artifacts.push_back(base + ".csv");
      artifacts.push_back(base + "_jumps.csv");
      artifacts.push_back(base + "_record.csv");
    }
  }
  out["artifacts"] = artifacts;
  verify_unravel(c, m, eta0, r, false, "nonlinear sse", checks, out);
  return out;
}

void write_conditional(const std::filesystem::path& p, const ConditionalState& st, bool linear) {
  auto os = open_out(p);
  const auto& states = linear ? st.sigma : st.rho;
  csv::write_evolution(os, st.time, states);
}

json run_sme(const RunConfig& c, const RateModel& m, const BlockDensity& eta0, bool linear, std::vector<Check>& checks) {
  if (!c.replay.empty()) {
    std::ifstream is(c.replay);
    if (!is) throw ConfigError("cannot open record " + c.replay);
    ObservedRecord record;
    try {
      record = csv::read_record(is);
    } catch (const std::runtime_error& e) {
      throw ConfigError(c.replay + ": " + e.what());
    }
    if (!record.matches(m)) throw ConfigError(c.replay + ": columns do not match the model's observed channels");
    const ConditionalState st = linear ? filter_linear(m, eta0, record) : filter_nonlinear(m, eta0, record);
    write_conditional(c.out / "conditional.csv", st, linear);
    json out{{"replay", c.replay}, {"steps", record.steps.size()}, {"final_rho", density_json(st.rho.back())}};
    if (linear) out["final_p"] = st.p.back();
    out["artifacts"] = {"conditional.csv"};
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& r : st.rho) min_eig = std::min(min_eig, r.min_eigenvalue());
    out["min_block_eigenvalue"] = min_eig;
    if (c.verify) checks.push_back({"negative a posteriori eigenvalue", std::max(0.0, -min_eig), 1e-8});
    return out;
  }
  const auto grid = positive_grid(lattice_grid(c.t, c.dt, std::max<std::size_t>(c.points, 2)));
  const UnravelResult r =
      linear ? average_linear_sme(m, eta0, grid, mc_options(c)) : average_nonlinear_sme(m, eta0, grid, mc_options(c));
  {
    auto os = open_out(c.out / "average.csv");
    csv::write_unravel(os, r, linear);
  }
  json out = unravel_json(r, linear);
  json artifacts{"average.csv"};
  if (c.dump_paths) {
    for (std::size_t i = 0; i < std::min(c.dump_count, c.ntraj); ++i) {
      RandomStream rng(c.seed, i);
      const SmeRun run = linear ? simulate_linear_sme(m, eta0, c.t, c.dt, rng, Retain::full)
                                : simulate_nonlinear_sme(m, eta0, c.t, c.dt, rng, Retain::full);
      const std::string base = std::string("records/") + (linear ? "linear_" : "nonlinear_") + std::to_string(i);
      auto rs = open_out(c.out / (base + "_record.csv"));
      csv::write_record(rs, run.record);
      write_conditional(c.out / (base + "_state.csv"), run.state, linear);
      artifacts.push_back(base + "_record.csv");
      artifacts.push_back(base + "_state.csv");
    }
  }
  out["artifacts"] = artifacts;
  verify_unravel(c, m, eta0, r, linear, linear ? "linear sme" : "nonlinear sme", checks, out);
  return out;
}

json run_spectrum(const RunConfig& c, const TwoLevelParams& p, std::vector<Check>& checks) {
  std::vector<double> nus;
  for (std::size_t q = 0; q < c.nu_points; ++q)
    nus.push_back(c.nu_points == 1 ? c.nu_min
                                   : c.nu_min + (c.nu_max - c.nu_min) * static_cast<double>(q) /
                                                    static_cast<double>(c.nu_points - 1));
  const auto a = twolevel::spectrum_form_a(p, nus);
  const auto b = twolevel::spectrum_form_b(p, nus);
  std::vector<csv::SpectrumRow> rows(nus.size());
  double gap = 0.0, min_sigma = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < nus.size(); ++q) {
    rows[q].nu = nus[q];
    rows[q].form_a = a[q];
    rows[q].form_b = b[q];
    const double scale = std::max(std::abs(a[q]), std::abs(b[q]));
    if (scale > 0.0) gap = std::max(gap, std::abs(a[q] - b[q]) / scale);
    min_sigma = std::min({min_sigma, a[q], b[q]});
  }
  json out{{"nu_points", nus.size()}, {"max_relative_gap", gap}, {"min_sigma", min_sigma}};
  if (c.quadrature) {
    const auto quad = twolevel::power_quadrature(p, nus, c.t);
    double worst = 0.0;
    for (std::size_t q = 0; q < nus.size(); ++q) {
      rows[q].power_quadrature = quad[q];
      worst = std::max(worst, std::abs(quad[q] - twolevel::power_limit(p, nus[q])) / twolevel::power_limit(p, nus[q]));
    }
    out["quadrature_max_relative_gap_to_limit"] = worst;
    if (c.verify) checks.push_back({"quadrature power vs 1 + 4 pi eps Sigma (relative)", worst, 0.02});
  }
  if (c.power_mc) {
    const auto mc = twolevel::power_monte_carlo(p, nus, {c.t, c.dt, c.ntraj, c.seed, c.workers});
    for (std::size_t q = 0; q < nus.size(); ++q) {
      rows[q].power_mc = mc[q].mean;
      rows[q].power_mc_se = mc[q].se;
      if (c.verify && rows[q].power_quadrature)
        checks.push_back({"power mc vs quadrature at nu=" + std::to_string(nus[q]),
                          std::abs(mc[q].mean - *rows[q].power_quadrature), 3.0 * mc[q].se});
    }
  }
  auto os = open_out(c.out / "spectrum.csv");
  csv::write_spectrum(os, rows);
  out["artifacts"] = {"spectrum.csv"};
  if (c.verify) {
    checks.push_back({"form A vs form B max relative gap", gap, 1e-10});
    checks.push_back({"negative spectrum value", std::max(0.0, -min_sigma), 0.0});
  }
  return out;
}

json run_equilibrium(const RunConfig& c, const RateModel& m, const TwoLevelParams* p, std::vector<Check>& checks) {
  const BlockDensity eq = equilibrium(m);
  const double residual = trace_norm(rate_generator(m, eq));
  json out{{"eta", density_json(eq)}, {"system_state", matrix_json(block_sum(eq))}, {"generator_residual", residual}};
  if (p) {
    const auto cf = twolevel::equilibrium_closed_form(*p);
    const auto& k = cf.coefficients;
    out["p"] = k.p;
    out["z1_plus"] = k.z1_plus;
    out["z2_plus"] = k.z2_plus;
    out["kappa2"] = k.kappa2;
    const double dist = trace_norm(eq - cf.eta);
    out["closed_form_distance"] = dist;
    if (c.verify) {
      checks.push_back({"null space vs closed form, trace distance", dist, 1e-10});
      checks.push_back({"(1 - p) z2+ - kappa p z1+", std::abs((1.0 - k.p) * k.z2_plus - p->kappa * k.p * k.z1_plus), 1e-12});
    }
  }
  if (c.verify) checks.push_back({"generator residual at equilibrium", residual, 1e-10});
  return out;
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

Method parse_method(const std::string& name) {
  for (const auto& [m, s] : kMethods)
    if (name == s) return m;
  throw ConfigError("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  for (const auto& [x, s] : kMethods)
    if (x == m) return s;
  return "?";
}

InitialState parse_initial(const std::string& name) {
  for (const auto& [x, s] : kInitial)
    if (name == s) return x;
  throw ConfigError("unknown initial state '" + name + "'");
}

std::string initial_name(InitialState s) {
  for (const auto& [x, n] : kInitial)
    if (x == s) return n;
  return "?";
}

void validate(const RunConfig& c) {
  if (!(c.t > 0.0) || !std::isfinite(c.t)) throw ConfigError("--t must be positive");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("--dt must be positive");
  if (c.ntraj < 1) throw ConfigError("--ntraj must be at least 1");
  if (c.points < 1) throw ConfigError("--points must be at least 1");
  if (c.method == Method::spectrum) {
    if (c.nu_points < 1) throw ConfigError("--nu-points must be at least 1");
    if (!(c.nu_max >= c.nu_min)) throw ConfigError("--nu-max must not be below --nu-min");
    if (!is_builtin(c)) throw ConfigError("spectrum requires the builtin twolevel model");
    if (c.power_mc && c.ntraj < 2) throw ConfigError("--power-mc needs --ntraj >= 2");
  }
  if (!c.params.empty() && !is_builtin(c)) throw ConfigError("--param only applies to the builtin twolevel model");
  if (!c.replay.empty() && c.method != Method::linear_sme && c.method != Method::nonlinear_sme)
    throw ConfigError("--replay only applies to linear-sme and nonlinear-sme");
}

TwoLevelParams apply_params(const std::vector<std::string>& overrides) {
  TwoLevelParams p = twolevel::reference_params();
  struct Field {
    const char* name;
    double TwoLevelParams::*member;
  };
  static const Field fields[] = {
      {"omega1", &TwoLevelParams::omega1}, {"omega2", &TwoLevelParams::omega2},
      {"gamma0", &TwoLevelParams::gamma0}, {"gamma1", &TwoLevelParams::gamma1},
      {"gamma2", &TwoLevelParams::gamma2}, {"kappa", &TwoLevelParams::kappa},
      {"epsilon", &TwoLevelParams::epsilon}, {"nu", &TwoLevelParams::nu},
      {"k", &TwoLevelParams::k},           {"lambda11", &TwoLevelParams::lambda11},
      {"lambda21", &TwoLevelParams::lambda21}, {"lambda12", &TwoLevelParams::lambda12},
  };
  std::vector<std::pair<const Field*, double>> parsed;
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    const Field* f = nullptr;
    for (const auto& x : fields)
      if (key == x.name) f = &x;
    if (!f) throw ConfigError("unknown twolevel parameter '" + key + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(val, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != val.size()) throw ConfigError("bad value for '" + key + "': '" + val + "'");
    parsed.emplace_back(f, v);
  }
  for (const auto& [f, v] : parsed)
    if (std::string(f->name).rfind("lambda", 0) != 0) p.*(f->member) = v;
  p.reset_intensities();
  for (const auto& [f, v] : parsed)
    if (std::string(f->name).rfind("lambda", 0) == 0) p.*(f->member) = v;
  return p;
}

json config_json(const RunConfig& c) {
  json j{{"model", c.model},
         {"params", c.params},
         {"method", method_name(c.method)},
         {"initial", initial_name(c.initial)},
         {"t", c.t},
         {"dt", c.dt},
         {"ntraj", c.ntraj},
         {"seed", c.seed},
         {"points", c.points},
         {"dump_paths", c.dump_paths},
         {"dump_count", c.dump_count},
         {"verify", c.verify}};
  if (c.method == Method::spectrum) {
    j["nu_min"] = c.nu_min;
    j["nu_max"] = c.nu_max;
    j["nu_points"] = c.nu_points;
    j["quadrature"] = c.quadrature;
    j["power_mc"] = c.power_mc;
  }
  if (!c.replay.empty()) j["replay"] = c.replay;
  return j;
}

std::string config_hash(const RunConfig& c) {
  // FNV-1a over the canonical dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

RunResult run(const RunConfig& c) {
  RunResult result;
  try {
    validate(c);
    RateModel m;
    TwoLevelParams p;
    if (is_builtin(c)) {
      p = apply_params(c.params);
      m = twolevel::build_model(p);
    } else {
      m = load_model(c.model);
      require_valid(m);
    }
    std::filesystem::create_directories(c.out);
    std::vector<Check> checks;
    json payload;
    if (c.method == Method::spectrum) {
      payload = run_spectrum(c, p, checks);
    } else if (c.method == Method::equilibrium) {
      payload = run_equilibrium(c, m, is_builtin(c) ? &p : nullptr, checks);
    } else {
      const BlockDensity eta0 = initial_state(m, c.initial);
      switch (c.method) {
        case Method::ode: payload = run_ode(c, m, eta0, checks); break;
        case Method::linear_sse: payload = run_linear_sse(c, m, eta0, checks); break;
        case Method::nonlinear_sse: payload = run_nonlinear_sse(c, m, eta0, checks); break;
        case Method::linear_sme: payload = run_sme(c, m, eta0, true, checks); break;
        case Method::nonlinear_sme: payload = run_sme(c, m, eta0, false, checks); break;
        default: break;
      }
    }
    result.summary = {{"method", method_name(c.method)}, {"config_hash", config_hash(c)}, {"result", payload}};
    if (c.verify) {
      bool all = true;
      result.summary["verify"] = checks_json(checks, all);
      result.summary["verify_pass"] = all;
      if (!all) result.status = kExitVerifyFailed;
    }
    {
      auto os = open_out(c.out / "summary.json");
      os << result.summary.dump(2) << '\n';
    }
    json manifest{{"config", config_json(c)},
                  {"config_hash", config_hash(c)},
                  {"seed", c.seed},
                  {"version", LINDRATE_VERSION},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"compiler", __VERSION__},
                  {"workers", resolve_workers(c.workers, c.ntraj)},
                  {"timestamp", iso_timestamp()}};
    auto os = open_out(c.out / "manifest.json");
    os << manifest.dump(2) << '\n';
  } catch (const ModelParseError& e) {
    result.status = e.invalid() ? kExitModel : kExitConfig;
    result.error = e.what();
  } catch (const ConfigError& e) {
    result.status = kExitConfig;
    result.error = e.what();
  } catch (const ModelError& e) {
    result.status = kExitModel;
    result.error = e.what();
  } catch (const NumericalError& e) {
    result.status = kExitNumerical;
    result.error = e.what();
  } catch (const DimensionError& e) {
    result.status = kExitModel;
    result.error = e.what();
  } catch (const std::exception& e) {
    result.status = kExitNumerical;
    result.error = e.what();
  }
  return result;
}

}  // namespace lindrate
