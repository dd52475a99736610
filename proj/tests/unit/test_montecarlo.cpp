#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lindrate/montecarlo.hpp"
#include "lindrate/sde_linear.hpp"
#include "lindrate/twolevel.hpp"
#include "oracles.hpp"

using namespace lindrate;

TEST_CASE("streams depend only on seed and index") {
  RandomStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  bool differs_index = false, differs_seed = false;
  for (int k = 0; k < 20; ++k) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differs_index |= x != c.normal();
    differs_seed |= x != d.normal();
  }
  CHECK(differs_index);
  CHECK(differs_seed);
}

TEST_CASE("run_indexed keeps index order for any worker count") {
  auto fn = [](std::size_t i) {
    RandomStream r(11, i);
    return r.uniform();
  };
  const auto one = run_indexed(257, 1, fn);
  for (unsigned w : {2u, 3u, 8u}) CHECK(run_indexed(257, w, fn) == one);
}

TEST_CASE("run_indexed rethrows the lowest failing index") {
  auto fn = [](std::size_t i) -> int {
    if (i == 5 || i == 9) throw std::runtime_error(std::to_string(i));
    return 0;
  };
  try {
    run_indexed(20, 4, fn);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "5");
  }
}

TEST_CASE("sample statistics match two-pass formulas") {
  oracle::Gen g(61);
  std::vector<Eigen::VectorXd> xs;
  for (int k = 0; k < 1001; ++k) xs.push_back(Eigen::Vector3d(g.normal(), 5.0 + g.normal(), 1e6 + g.uniform()));
  const SampleStats s = sample_stats(xs);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
  for (const auto& x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(3);
  for (const auto& x : xs) var += (x - mean).cwiseAbs2();
  var /= static_cast<double>(xs.size() - 1);
  CHECK(s.count == xs.size());
  CHECK((s.mean - mean).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((s.variance - var).cwiseQuotient(var).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((s.standard_error() - (var / 1001.0).cwiseSqrt()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("packing round trip") {
  oracle::Gen g(62);
  const BlockDensity x = g.blocks(3, 2);
  const Eigen::VectorXd v = pack(x);
  CHECK(v.size() == packed_size(3, 2));
  CHECK(trace_norm(unpack(v, 0, 3, 2) - x) == 0.0);
  Eigen::VectorXd w(v.size() + 2);
  w << 1.0, v, 2.0;
  CHECK(trace_norm(unpack(w, 1, 3, 2) - x) == 0.0);
}

TEST_CASE("block estimates report per-entry errors") {
  std::vector<Eigen::VectorXd> xs;
  for (int k = 0; k < 4; ++k) {
    BlockDensity x(1, 1);
    x[0](0, 0) = cplx(k, -k);
    xs.push_back(pack(x));
  }
  const BlockEstimate e = block_estimate(sample_stats(xs), 0, 1, 1);
  CHECK(e.mean[0](0, 0) == cplx(1.5, -1.5));
  // Var Re = Var Im = 5/3 for {0, 1, 2, 3}.
  CHECK(e.aggregate_variance == doctest::Approx(10.0 / 3.0));
  CHECK(e.entry_se[0](0, 0) == doctest::Approx(std::sqrt(10.0 / 3.0 / 4.0)));
  CHECK(e.sigma[0] == doctest::Approx(e.entry_se[0](0, 0)));
  CHECK(e.total_sigma() == doctest::Approx(e.sigma[0]));
}

TEST_CASE("unravelling results do not depend on the worker count") {
  const RateModel m = twolevel::build_model(twolevel::reference_params());
  const BlockDensity eta0 = twolevel::equilibrium_closed_form(twolevel::reference_params()).eta;
  McOptions o;
  o.dt = 1e-2;
  o.ntraj = 64;
  o.seed = 5;
  o.workers = 1;
  const UnravelPoint a = unravel_weighted(m, eta0, 0.5, o);
  o.workers = 4;
  const UnravelPoint b = unravel_weighted(m, eta0, 0.5, o);
  CHECK(trace_norm(a.state.mean - b.state.mean) == 0.0);
  CHECK(a.p_mean == b.p_mean);
  CHECK(a.p_se == b.p_se);
}
