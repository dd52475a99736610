#include <doctest.h>

#include <string>

#include "lindrate/model_io.hpp"
#include "lindrate/twolevel.hpp"
#include "oracles.hpp"

using namespace lindrate;

namespace {

// Parses and returns the (line, field) of the expected failure.
std::pair<int, std::string> parse_error(const std::string& text) {
  try {
    parse_model(text);
  } catch (const ModelParseError& e) {
    return {e.line(), e.field()};
  }
  FAIL("no parse error");
  return {0, ""};
}

}  // namespace

TEST_CASE("the two-level model file matches the builtin model") {
  const RateModel file = load_model(LINDRATE_TEST_DATA "/twolevel.yaml");
  const RateModel builtin = twolevel::build_model(twolevel::reference_params());
  REQUIRE(validate(file).empty());
  CHECK(file.n == 2);
  CHECK(file.d1 == builtin.d1);
  CHECK(file.d2 == builtin.d2);
  CHECK(file.m1() == builtin.m1());
  CHECK(file.m2() == builtin.m2());
  CHECK(file.observed.d1 == builtin.observed.d1);
  CHECK(file.observed.m1 == builtin.observed.m1);
  CHECK(file.observed.m2 == builtin.observed.m2);
  for (int c = 0; c < builtin.m2(); ++c)
    CHECK(file.coupling[static_cast<std::size_t>(c)].intensity == builtin.coupling[static_cast<std::size_t>(c)].intensity);

  oracle::Gen g(41);
  for (int trial = 0; trial < 5; ++trial) {
    const BlockDensity tau = g.blocks(2, 2);
    const double t = g.uniform(0, 3);
    CHECK(trace_norm(rate_generator(file, tau, t) - rate_generator(builtin, tau, t)) < 1e-13);
    const Matrix T = g.full_density(4);
    CHECK((extended_generator(file, T, t) - extended_generator(builtin, T, t)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("matrices as rows, diagonals and complex entries") {
  const RateModel m = parse_model(R"(
n: 1
d: 2
hamiltonian:
  - [[1, [0, -1]], [[0, 1], 2]]
channels:
  - type: jump-diagonal
    observed: true
    blocks:
      - {diag: [1, [0, 2]], scale: 0.5}
    intensity: 2.5
  - type: diffusive-diagonal
    blocks:
      - {rows: [[0, 1], [0, 0]]}
    nu: [3.0]
)");
  REQUIRE(validate(m).empty());
  CHECK(m.hamiltonian[0](0, 1) == cplx(0, -1));
  CHECK(m.hamiltonian[0](1, 1) == cplx(2, 0));
  CHECK(m.d1 == 1);
  CHECK(m.observed.d1 == 0);
  CHECK(m.observed.m1 == 2);
  CHECK(m.diagonal[1].base[0](1, 1) == cplx(0, 1));
  CHECK(m.diagonal[1].intensity == 2.5);
  CHECK(std::abs(m.diagonal[0].factor(0, 1.0) - std::exp(kI * 3.0)) < 1e-15);
}

TEST_CASE("parse errors cite line and field") {
  SUBCASE("missing key") {
    const auto [line, field] = parse_error("n: 1\nhamiltonian: [[[1]]]\n");
    CHECK(line == 1);
    CHECK(field == "d");
  }
  SUBCASE("bad scalar") {
    const auto [line, field] = parse_error("n: 1\nd: two\nhamiltonian: [[[1]]]\n");
    CHECK(line == 2);
    CHECK(field == "d");
  }
  SUBCASE("non-Hermitian Hamiltonian") {
    const auto [line, field] = parse_error("n: 1\nd: 2\nhamiltonian:\n  - [[0, 1], [0, 0]]\n");
    CHECK(line == 4);
    CHECK(field == "hamiltonian");
  }
  SUBCASE("wrong row length") {
    const auto [line, field] = parse_error("n: 1\nd: 2\nhamiltonian:\n  - [[0, 1], [1]]\n");
    CHECK(line == 4);
    CHECK(field == "hamiltonian[1]");
  }
  SUBCASE("unknown channel type") {
    const auto [line, field] =
        parse_error("n: 1\nd: 1\nhamiltonian: [[[0]]]\nchannels:\n  - type: teleport\n    all: [[1]]\n");
    CHECK(line == 5);
    CHECK(field == "channels[1].type");
  }
  SUBCASE("zero intensity on a live column") {
    const auto [line, field] = parse_error(R"(n: 2
d: 1
hamiltonian: {all: [[0]]}
channels:
  - type: jump-coupling
    entries:
      - {to: 2, from: 1, op: [[1]]}
    intensities: [0.0, 1.0]
)");
    CHECK(line == 8);
    CHECK(field == "channels[1].intensities");
  }
  SUBCASE("observed channels form a prefix") {
    const auto [line, field] = parse_error(R"(n: 1
d: 1
hamiltonian: [[[0]]]
channels:
  - type: diffusive-diagonal
    all: [[1]]
  - type: diffusive-diagonal
    observed: true
    all: [[1]]
)");
    CHECK(line == 7);
    CHECK(field == "channels[2]");
  }
  SUBCASE("diffusive coupling cannot be observed") {
    const auto [line, field] = parse_error(R"(n: 2
d: 1
hamiltonian: {all: [[0]]}
channels:
  - type: diffusive-coupling
    observed: true
    entries:
      - {to: 2, from: 1, op: [[1]]}
)");
    CHECK(line == 6);
    CHECK(field == "channels[1].observed");
  }
  SUBCASE("named operators need d = 2") {
    const auto [line, field] = parse_error("n: 1\nd: 3\nhamiltonian:\n  - {named: sigma_z}\n");
    CHECK(line == 4);
    CHECK(field == "hamiltonian[1]");
  }
  SUBCASE("malformed document") {
    const auto [line, field] = parse_error("n: 1\nd: [1\n");
    CHECK(line >= 2);
    CHECK(field == "<document>");
  }
}

TEST_CASE("missing model files are reported") {
  CHECK_THROWS_AS(load_model("/nonexistent/model.yaml"), ModelParseError);
}

TEST_CASE("inadmissible models are told apart from malformed documents") {
  auto invalid = [](const std::string& text) {
    try {
      parse_model(text);
    } catch (const ModelParseError& e) {
      return e.invalid();
    }
    FAIL("no parse error");
    return false;
  };
  CHECK(invalid("n: 1\nd: 2\nhamiltonian:\n  - [[0, 1], [0, 0]]\n"));
  CHECK(invalid("n: 0\nd: 1\nhamiltonian: []\n"));
  CHECK_FALSE(invalid("n: 1\nd: two\nhamiltonian: [[[1]]]\n"));
  CHECK_FALSE(invalid("n: 1\nd: [1\n"));
  CHECK_FALSE(invalid("n: 1\nd: 1\nhamiltonian: [[[0]]]\nchannels:\n  - type: teleport\n    all: [[1]]\n"));
}
