#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lindrate/csv.hpp"
#include "lindrate/run.hpp"

using namespace lindrate;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "lindrate_unit" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

// The reference model file with both jump couplings observed.
std::string counted_model(const fs::path& dir) {
  std::string text = slurp(LINDRATE_TEST_DATA "/twolevel.yaml");
  for (const char* name : {"band_transfer", "thermal_excitation"}) {
    const std::string key = std::string("name: ") + name + "\n";
    text.replace(text.find(key), key.size(), key + "    observed: true\n");
  }
  const fs::path p = dir / "counted.yaml";
  std::ofstream(p) << text;
  return p.string();
}

RunConfig base(const std::string& name, Method method) {
  RunConfig c;
  c.method = method;
  c.out = scratch(name);
  return c;
}

}  // namespace

TEST_CASE("equilibrium run on the builtin model") {
  RunConfig c = base("equilibrium", Method::equilibrium);
  c.verify = true;
  const RunResult r = run(c);
  REQUIRE(r.status == kExitOk);
  const auto& res = r.summary["result"];
  CHECK(res["p"].get<double>() == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(res["z1_plus"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(res["z2_plus"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(res["closed_form_distance"].get<double>() < 1e-10);
  CHECK(r.summary["verify_pass"].get<bool>());
  CHECK(fs::exists(c.out / "summary.json"));
  const auto manifest = nlohmann::json::parse(slurp(c.out / "manifest.json"));
  CHECK(manifest["config_hash"] == r.summary["config_hash"]);
  CHECK(manifest["seed"] == c.seed);
  CHECK(manifest.contains("version"));
}

TEST_CASE("spectrum run writes both forms") {
  RunConfig c = base("spectrum", Method::spectrum);
  c.nu_points = 51;
  c.verify = true;
  const RunResult r = run(c);
  REQUIRE(r.status == kExitOk);
  CHECK(r.summary["result"]["max_relative_gap"].get<double>() < 1e-10);
  CHECK(first_line(c.out / "spectrum.csv") == "nu,sigma_form_a,sigma_form_b");
  std::ifstream is(c.out / "spectrum.csv");
  std::string line;
  int rows = -1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 51);
}

TEST_CASE("identical configurations give identical artifacts") {
  auto once = [](const std::string& name, unsigned workers) {
    RunConfig c = base(name, Method::linear_sse);
    c.t = 0.5;
    c.dt = 1e-2;
    c.ntraj = 40;
    c.seed = 9;
    c.points = 3;
    c.workers = workers;
    c.dump_paths = true;
    c.dump_count = 2;
    REQUIRE(run(c).status == kExitOk);
    return c.out;
  };
  const fs::path a = once("det_a", 1), b = once("det_b", 1), w = once("det_w", 4);
  for (const char* f : {"summary.json", "unravel.csv", "paths/linear_0.csv", "paths/linear_0_jumps.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(w / f));
  }
}

TEST_CASE("errors map to exit statuses") {
  SUBCASE("non-positive step") {
    RunConfig c = base("bad_dt", Method::ode);
    c.dt = 0.0;
    const RunResult r = run(c);
    CHECK(r.status == kExitConfig);
    CHECK_FALSE(r.error.empty());
  }
  SUBCASE("unknown parameter") {
    RunConfig c = base("bad_param", Method::ode);
    c.params = {"omega3=1"};
    CHECK(run(c).status == kExitConfig);
  }
  SUBCASE("malformed model file") {
    RunConfig c = base("bad_file", Method::ode);
    c.model = (c.out / "model.yaml").string();
    std::ofstream(c.model) << "n: 1\nd: [1\n";
    CHECK(run(c).status == kExitConfig);
  }
  SUBCASE("inadmissible parameters") {
    RunConfig c = base("bad_eps", Method::equilibrium);
    c.params = {"epsilon=0"};
    CHECK(run(c).status == kExitModel);
  }
  SUBCASE("inadmissible model file") {
    RunConfig c = base("bad_model", Method::ode);
    c.model = (c.out / "model.yaml").string();
    std::ofstream(c.model) << "n: 1\nd: 2\nhamiltonian:\n  - [[0, 1], [0, 0]]\n";
    CHECK(run(c).status == kExitModel);
  }
  SUBCASE("a record with an impossible jump") {
    RunConfig c = base("bad_record", Method::nonlinear_sme);
    c.model = counted_model(c.out);
    c.initial = InitialState::first;
    c.replay = (c.out / "record.csv").string();
    // Two excitations in a row: the second finds block one empty.
    std::ofstream(c.replay) << "time,W1,M1,M2\n0,0,0,0\n0.01,0,0,1\n0.02,0,0,2\n";
    CHECK(run(c).status == kExitNumerical);
  }
  SUBCASE("a record for other channels") {
    RunConfig c = base("bad_columns", Method::linear_sme);
    c.replay = (c.out / "record.csv").string();
    std::ofstream(c.replay) << "time,W1,M1\n0,0,0\n0.01,0.1,0\n";
    CHECK(run(c).status == kExitConfig);
  }
}

TEST_CASE("a dumped record replays to its stored conditional state") {
  RunConfig c = base("record", Method::nonlinear_sme);
  c.t = 1.0;
  c.dt = 1e-3;
  c.ntraj = 2;
  c.dump_paths = true;
  c.dump_count = 1;
  c.initial = InitialState::uniform;
  REQUIRE(run(c).status == kExitOk);
  const fs::path record = c.out / "records/nonlinear_0_record.csv";
  REQUIRE(fs::exists(record));

  RunConfig rc = base("replay", Method::nonlinear_sme);
  rc.initial = InitialState::uniform;
  rc.replay = record.string();
  const RunResult r = run(rc);
  REQUIRE(r.status == kExitOk);
  CHECK(r.summary["result"]["steps"].get<std::size_t>() == 1000);

  auto last_row = [](const fs::path& p) {
    std::ifstream is(p);
    std::string line, last;
    while (std::getline(is, line))
      if (!line.empty()) last = line;
    std::vector<double> xs;
    std::stringstream ss(last);
    for (std::string cell; std::getline(ss, cell, ',');) xs.push_back(std::stod(cell));
    return xs;
  };
  const auto stored = last_row(c.out / "records/nonlinear_0_state.csv");
  const auto replayed = last_row(rc.out / "conditional.csv");
  REQUIRE(stored.size() == replayed.size());
  for (std::size_t k = 0; k < stored.size(); ++k) CHECK(replayed[k] == doctest::Approx(stored[k]).epsilon(1e-9));
}

TEST_CASE("density column names") {
  const auto cols = csv::density_columns(2, 2);
  REQUIRE(cols.size() == 16);
  CHECK(cols.front() == "eta1_11_re");
  CHECK(cols[1] == "eta1_11_im");
  CHECK(cols[2] == "eta1_21_re");
  CHECK(cols.back() == "eta2_22_im");
  CHECK(csv::density_columns(1, 1, "rho") == std::vector<std::string>{"rho1_11_re", "rho1_11_im"});
}

TEST_CASE("records survive a write and read") {
  std::istringstream in("time,W1,M1,M2\n0,0,0,0\n0.5,0.25,1,0\n1,-0.5,1,2\n");
  const ObservedRecord r = csv::read_record(in);
  CHECK(r.w_channels == std::vector<int>{0});
  CHECK(r.m_channels == std::vector<int>{0, 1});
  REQUIRE(r.steps.size() == 2);
  CHECK(r.steps[1].dW[0] == doctest::Approx(-0.75));
  CHECK(r.steps[1].dM == std::vector<int>{0, 2});
  std::ostringstream out;
  csv::write_record(out, r);
  std::istringstream again(out.str());
  const ObservedRecord s = csv::read_record(again);
  CHECK(s.time == r.time);
  CHECK(s.steps[0].dW == r.steps[0].dW);

  std::istringstream bad("time,W1\n0,0\n0,1\n");
  CHECK_THROWS_AS(csv::read_record(bad), std::runtime_error);
  std::istringstream down("time,M1\n0,2\n1,1\n");
  CHECK_THROWS_AS(csv::read_record(down), std::runtime_error);
}
