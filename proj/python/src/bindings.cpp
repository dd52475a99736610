#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lindrate/master.hpp"
#include "lindrate/model_io.hpp"
#include "lindrate/run.hpp"
#include "lindrate/sde_linear.hpp"
#include "lindrate/sde_nonlinear.hpp"
#include "lindrate/sme.hpp"
#include "lindrate/twolevel.hpp"

namespace py = pybind11;
using namespace lindrate;
using twolevel::TwoLevelParams;

namespace {

std::vector<Matrix> to_list(const BlockDensity& x) {
  std::vector<Matrix> out;
  for (int i = 0; i < x.n(); ++i) out.push_back(x[i]);
  return out;
}

BlockDensity from_list(const std::vector<Matrix>& blocks) { return BlockDensity(blocks); }

py::dict unravel_dict(const UnravelResult& r) {
  std::vector<double> time, p_mean, p_se;
  std::vector<std::vector<Matrix>> mean;
  std::vector<std::vector<double>> sigma;
  for (const auto& pt : r.points) {
    time.push_back(pt.time);
    mean.push_back(to_list(pt.state.mean));
    sigma.push_back(pt.state.sigma);
    p_mean.push_back(pt.p_mean);
    p_se.push_back(pt.p_se);
  }
  py::dict d;
  d["time"] = time;
  d["mean"] = mean;
  d["sigma"] = sigma;
  d["p_mean"] = p_mean;
  d["p_se"] = p_se;
  d["dt"] = r.dt;
  d["ntraj"] = r.ntraj;
  return d;
}

McOptions options(double dt, std::size_t ntraj, std::uint64_t seed, unsigned workers) {
  McOptions o;
  o.dt = dt;
  o.ntraj = ntraj;
  o.seed = seed;
  o.workers = workers;
  return o;
}

}  // namespace

PYBIND11_MODULE(_lindrate, mod) {
  mod.doc() = "Lindblad rate equations: block density matrices, unravellings and filtering";

  py::register_exception<ModelError>(mod, "ModelError", PyExc_ValueError);
  py::register_exception<ModelParseError>(mod, "ModelParseError", PyExc_ValueError);
  py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);

  py::class_<TwoLevelParams>(mod, "TwoLevelParams")
      .def(py::init<>())
      .def_readwrite("omega1", &TwoLevelParams::omega1)
      .def_readwrite("omega2", &TwoLevelParams::omega2)
      .def_readwrite("gamma0", &TwoLevelParams::gamma0)
      .def_readwrite("gamma1", &TwoLevelParams::gamma1)
      .def_readwrite("gamma2", &TwoLevelParams::gamma2)
      .def_readwrite("kappa", &TwoLevelParams::kappa)
      .def_readwrite("epsilon", &TwoLevelParams::epsilon)
      .def_readwrite("nu", &TwoLevelParams::nu)
      .def_readwrite("k", &TwoLevelParams::k)
      .def_readwrite("lambda11", &TwoLevelParams::lambda11)
      .def_readwrite("lambda21", &TwoLevelParams::lambda21)
      .def_readwrite("lambda12", &TwoLevelParams::lambda12)
      .def("reset_intensities", &TwoLevelParams::reset_intensities)
      .def("check", &TwoLevelParams::check);

  py::class_<RateModel>(mod, "RateModel")
      .def_readonly("n", &RateModel::n)
      .def_readonly("d", &RateModel::d)
      .def_readonly("d1", &RateModel::d1)
      .def_readonly("d2", &RateModel::d2)
      .def_property_readonly("m1", &RateModel::m1)
      .def_property_readonly("m2", &RateModel::m2)
      .def("validate", [](const RateModel& m) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& d : validate(m)) out.emplace_back(d.field, d.message);
        return out;
      });

  mod.def("reference_params", &twolevel::reference_params);
  mod.def("twolevel_model", &twolevel::build_model, py::arg("params"));
  mod.def("load_model", [](const std::string& path) { return load_model(path); }, py::arg("path"));
  mod.def("parse_model", &parse_model, py::arg("text"));

  mod.def(
      "rate_generator",
      [](const RateModel& m, const std::vector<Matrix>& tau, double t) { return to_list(rate_generator(m, from_list(tau), t)); },
      py::arg("model"), py::arg("tau"), py::arg("t") = 0.0);
  mod.def("vectorized_rate_generator", &vectorized_rate_generator, py::arg("model"));
  mod.def("equilibrium", [](const RateModel& m) { return to_list(equilibrium(m)); }, py::arg("model"));
  mod.def(
      "evolve",
      [](const RateModel& m, const std::vector<Matrix>& eta0, const std::vector<double>& grid) {
        EvolveOptions o;
        o.method = EvolveMethod::expm;
        std::vector<std::vector<Matrix>> out;
        for (const auto& e : evolve(m, from_list(eta0), grid, o)) out.push_back(to_list(e));
        return out;
      },
      py::arg("model"), py::arg("eta0"), py::arg("grid"));
  mod.def("classical_reduction", &classical_reduction, py::arg("model"));

  mod.def(
      "unravel_weighted",
      [](const RateModel& m, const std::vector<Matrix>& eta0, const std::vector<double>& grid, double dt,
         std::size_t ntraj, std::uint64_t seed, unsigned workers) {
        UnravelResult r;
        {
          py::gil_scoped_release release;
          r = unravel_weighted(m, from_list(eta0), grid, options(dt, ntraj, seed, workers));
        }
        return unravel_dict(r);
      },
      py::arg("model"), py::arg("eta0"), py::arg("grid"), py::arg("dt") = 1e-3, py::arg("ntraj") = 1000,
      py::arg("seed") = 1, py::arg("workers") = 0);
  mod.def(
      "unravel_normalized",
      [](const RateModel& m, const std::vector<Matrix>& eta0, const std::vector<double>& grid, double dt,
         std::size_t ntraj, std::uint64_t seed, unsigned workers) {
        UnravelResult r;
        {
          py::gil_scoped_release release;
          r = unravel_normalized(m, from_list(eta0), grid, options(dt, ntraj, seed, workers));
        }
        return unravel_dict(r);
      },
      py::arg("model"), py::arg("eta0"), py::arg("grid"), py::arg("dt") = 1e-3, py::arg("ntraj") = 1000,
      py::arg("seed") = 1, py::arg("workers") = 0);
  mod.def(
      "average_sme",
      [](const RateModel& m, const std::vector<Matrix>& eta0, const std::vector<double>& grid, bool linear, double dt,
         std::size_t ntraj, std::uint64_t seed, unsigned workers) {
        UnravelResult r;
        {
          py::gil_scoped_release release;
          const McOptions o = options(dt, ntraj, seed, workers);
          r = linear ? average_linear_sme(m, from_list(eta0), grid, o) : average_nonlinear_sme(m, from_list(eta0), grid, o);
        }
        return unravel_dict(r);
      },
      py::arg("model"), py::arg("eta0"), py::arg("grid"), py::arg("linear") = false, py::arg("dt") = 1e-3,
      py::arg("ntraj") = 1000, py::arg("seed") = 1, py::arg("workers") = 0);

  mod.def(
      "coefficients",
      [](const TwoLevelParams& p) {
        const auto c = twolevel::coefficients(p);
        py::dict d;
        d["p"] = c.p;
        d["z1_plus"] = c.z1_plus;
        d["z1_minus"] = c.z1_minus;
        d["z2_plus"] = c.z2_plus;
        d["z2_minus"] = c.z2_minus;
        d["kappa1"] = c.kappa1;
        d["kappa2"] = c.kappa2;
        d["Gamma1"] = c.Gamma1;
        d["Gamma2"] = c.Gamma2;
        return d;
      },
      py::arg("params"));
  mod.def(
      "equilibrium_closed_form", [](const TwoLevelParams& p) { return to_list(twolevel::equilibrium_closed_form(p).eta); },
      py::arg("params"));
  mod.def(
      "spectrum",
      [](const TwoLevelParams& p, const std::vector<double>& nus, const std::string& form) {
        if (form == "a") return twolevel::spectrum_form_a(p, nus);
        if (form == "b") return twolevel::spectrum_form_b(p, nus);
        throw py::value_error("form must be 'a' or 'b'");
      },
      py::arg("params"), py::arg("nus"), py::arg("form") = "b");
  mod.def("power_limit", &twolevel::power_limit, py::arg("params"), py::arg("nu"));
  mod.def(
      "power_quadrature",
      [](const TwoLevelParams& p, const std::vector<double>& nus, double t, double h) {
        py::gil_scoped_release release;
        return twolevel::power_quadrature(p, nus, t, h);
      },
      py::arg("params"), py::arg("nus"), py::arg("t"), py::arg("h") = 0.05);
  mod.def(
      "power_monte_carlo",
      [](const TwoLevelParams& p, const std::vector<double>& nus, double t, double dt, std::size_t ntraj,
         std::uint64_t seed, unsigned workers) {
        std::vector<twolevel::PowerEstimate> est;
        {
          py::gil_scoped_release release;
          est = twolevel::power_monte_carlo(p, nus, {t, dt, ntraj, seed, workers});
        }
        std::vector<std::pair<double, double>> out;
        for (const auto& e : est) out.emplace_back(e.mean, e.se);
        return out;
      },
      py::arg("params"), py::arg("nus"), py::arg("t"), py::arg("dt") = 0.01, py::arg("ntraj") = 2000,
      py::arg("seed") = 1, py::arg("workers") = 0);

  mod.def(
      "run",
      [](const std::string& method, const std::string& out, const std::string& model,
         const std::vector<std::string>& params, const std::string& initial, double t, double dt, std::size_t ntraj,
         std::uint64_t seed, unsigned workers, std::size_t points, double nu_min, double nu_max,
         std::size_t nu_points, bool verify) {
        RunConfig c;
        c.method = parse_method(method);
        c.initial = parse_initial(initial);
        c.out = out;
        c.model = model;
        c.params = params;
        c.t = t;
        c.dt = dt;
        c.ntraj = ntraj;
        c.seed = seed;
        c.workers = workers;
        c.points = points;
        c.nu_min = nu_min;
        c.nu_max = nu_max;
        c.nu_points = nu_points;
        c.verify = verify;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(c);
        }
        return py::make_tuple(r.status, r.summary.dump(), r.error);
      },
      py::arg("method"), py::arg("out"), py::arg("model") = "twolevel", py::arg("params") = std::vector<std::string>{},
      py::arg("initial") = "equilibrium", py::arg("t") = 1.0, py::arg("dt") = 1e-3, py::arg("ntraj") = 1000,
      py::arg("seed") = 1, py::arg("workers") = 0, py::arg("points") = 11, py::arg("nu_min") = 0.0,
      py::arg("nu_max") = 2.0, py::arg("nu_points") = 201, py::arg("verify") = false);
}
