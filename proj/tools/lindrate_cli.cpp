#include <iostream>

#include <CLI11.hpp>

#include "lindrate/run.hpp"

int main(int argc, char** argv) {
  using namespace lindrate;
  RunConfig cfg;
  std::string method = "ode";
  std::string initial = "equilibrium";

  CLI::App app{"Lindblad rate equations: master equation, stochastic unravellings, filtering and spectra"};
  app.set_config("--config", "", "TOML or INI file with option values");
  app.add_option("--model", cfg.model, "Model file (YAML) or the builtin 'twolevel'")->capture_default_str();
  app.add_option("--param", cfg.params, "twolevel parameter override key=value (repeatable)");
  app.add_option("--method", method,
                 "ode | linear-sse | nonlinear-sse | linear-sme | nonlinear-sme | spectrum | equilibrium")
      ->capture_default_str();
  app.add_option("--initial", initial, "equilibrium | uniform | first")->capture_default_str();
  app.add_option("--t", cfg.t, "Horizon")->capture_default_str();
  app.add_option("--dt", cfg.dt, "Step size")->capture_default_str();
  app.add_option("--ntraj", cfg.ntraj, "Trajectories")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads (0: hardware concurrency)")->capture_default_str();
  app.add_option("--points", cfg.points, "Output grid points on [0, t]")->capture_default_str();
  app.add_option("--nu-min", cfg.nu_min, "Spectrum grid start")->capture_default_str();
  app.add_option("--nu-max", cfg.nu_max, "Spectrum grid end")->capture_default_str();
  app.add_option("--nu-points", cfg.nu_points, "Spectrum grid points")->capture_default_str();
  app.add_flag("--quadrature", cfg.quadrature, "Spectrum: add the quadrature power at horizon t");
  app.add_flag("--power-mc", cfg.power_mc, "Spectrum: add the Monte Carlo power at horizon t");
  app.add_option("--replay", cfg.replay, "SME methods: filter the observed record in this CSV");
  std::string out = cfg.out.string();
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_flag("--verify", cfg.verify, "Run oracle cross-checks and report pass/fail");
  app.add_flag("--dump-paths", cfg.dump_paths, "Write individual trajectories and records");
  app.add_option("--dump-count", cfg.dump_count, "Trajectories written by --dump-paths")->capture_default_str();

  try {
    app.parse(argc, argv);
    cfg.method = parse_method(method);
    cfg.initial = parse_initial(initial);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  cfg.out = out;

  const RunResult r = run(cfg);
  if (r.status == kExitConfig || r.status == kExitModel || r.status == kExitNumerical) {
    std::cerr << "error: " << r.error << '\n';
    return r.status;
  }
  std::cout << r.summary.dump(2) << '\n';
  return r.status;
}
