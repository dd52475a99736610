#pragma once

// Command-line run configuration and execution.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lindrate/twolevel.hpp"

namespace lindrate {

using twolevel::TwoLevelParams;

enum class Method { ode, linear_sse, nonlinear_sse, linear_sme, nonlinear_sme, spectrum, equilibrium };

Method parse_method(const std::string& name);
std::string method_name(Method m);

enum class InitialState {
  equilibrium,  // stationary state of the model
  uniform,      // identity / (n d)
  first,        // basis state 1 of block 1
};

InitialState parse_initial(const std::string& name);
std::string initial_name(InitialState s);

struct RunConfig {
  std::string model = "twolevel";  // a model file, or the builtin "twolevel"
  std::vector<std::string> params;  // key=value overrides of TwoLevelParams
  Method method = Method::ode;
  InitialState initial = InitialState::equilibrium;
  double t = 1.0;
  double dt = 1e-3;
  std::size_t ntraj = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::size_t points = 11;  // output grid points on [0, t]
  double nu_min = 0.0;
  double nu_max = 2.0;
  std::size_t nu_points = 201;
  bool quadrature = false;  // spectrum: add the quadrature power
  bool power_mc = false;    // spectrum: add the Monte Carlo power
  std::string replay;       // linear-sme / nonlinear-sme: record CSV to filter
  std::filesystem::path out = "lindrate_out";
  bool verify = false;
  bool dump_paths = false;
  std::size_t dump_count = 4;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws ConfigError when a field is out of range.
void validate(const RunConfig& config);

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitModel = 3;
inline constexpr int kExitNumerical = 4;

TwoLevelParams apply_params(const std::vector<std::string>& overrides);

// Canonical JSON of the configuration (without output paths).
nlohmann::json config_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

struct RunResult {
  int status = kExitOk;
  nlohmann::json summary;
  std::string error;
};

// Writes summary.json, manifest.json and the method's CSV artifacts into
// config.out. Errors are mapped to exit statuses, never thrown.
RunResult run(const RunConfig& config);

}  // namespace lindrate
