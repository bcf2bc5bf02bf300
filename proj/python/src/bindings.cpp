#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lqmfg/cli.hpp"
#include "lqmfg/error.hpp"
#include "lqmfg/experiments.hpp"

namespace py = pybind11;
using namespace lqmfg;

namespace {

py::array_t<double> array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::object profile_get(const TimeProfile& p) {
  if (p.is_constant()) return py::float_(p.constant_value());
  return array(p.samples());
}

TimeProfile profile_set(const py::object& value) {
  if (py::isinstance<py::float_>(value) || py::isinstance<py::int_>(value)) {
    return value.cast<double>();
  }
  return TimeProfile::sampled(value.cast<std::vector<double>>());
}

#define PROFILE(name)                                                             \
  def_property(                                                                   \
      #name, [](const CoefficientSet& c) { return profile_get(c.name); },         \
      [](CoefficientSet& c, const py::object& v) { c.name = profile_set(v); })

py::dict riccati_dict(const RiccatiSolution& s, const GainSchedule& g) {
  py::dict d;
  d["t"] = array(s.grid.nodes());
  d["P"] = array(s.P);
  d["K"] = array(s.K);
  d["phi"] = array(s.phi);
  d["alpha"] = array(g.alpha);
  d["beta"] = array(g.beta);
  d["gamma"] = array(g.gamma);
  d["delta"] = array(g.delta);
  return d;
}

py::dict table_dict(const ExperimentTable& t) {
  py::dict d;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    py::list col;
    for (const auto& row : t.rows) {
      std::visit([&](const auto& v) { col.append(v); }, row[c]);
    }
    d[py::str(t.columns[c])] = col;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scalar indefinite LQ mean-field game solver";

  auto config_error =
      py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_ArithmeticError);
  py::register_exception<SimulationDivergedError>(m, "SimulationDivergedError",
                                                  PyExc_RuntimeError);
  (void)config_error;

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<double, std::size_t>(), py::arg("horizon"), py::arg("steps"))
      .def_property_readonly("horizon", &TimeGrid::horizon)
      .def_property_readonly("steps", &TimeGrid::steps)
      .def_property_readonly("dt", &TimeGrid::dt)
      .def("nodes", [](const TimeGrid& g) { return array(g.nodes()); });

  py::class_<CoefficientSet>(m, "CoefficientSet")
      .def(py::init<>())
      .def_static("uniform", &CoefficientSet::uniform, py::arg("value"))
      .PROFILE(A).PROFILE(B).PROFILE(C).PROFILE(D).PROFILE(f).PROFILE(g)
      .PROFILE(Q).PROFILE(R).PROFILE(Gamma).PROFILE(eta)
      .def_readwrite("H", &CoefficientSet::H)
      .def_readwrite("Gamma0", &CoefficientSet::Gamma0)
      .def_readwrite("eta0", &CoefficientSet::eta0)
      .def("fingerprint", [](const CoefficientSet& c) { return fingerprint(c); });

  py::class_<InitialLaw>(m, "InitialLaw")
      .def_static("uniform", &InitialLaw::uniform, py::arg("lower"), py::arg("upper"))
      .def_static("gaussian", &InitialLaw::gaussian, py::arg("mean"), py::arg("variance"))
      .def_static("point", &InitialLaw::point, py::arg("value"))
      .def_property_readonly("mean", &InitialLaw::mean)
      .def("__repr__", &InitialLaw::describe);

  m.def(
      "validate",
      [](const CoefficientSet& c, const TimeGrid& g) {
        const auto r = validate(c, g);
        py::dict d;
        d["a3_holds"] = r.a3_holds();
        d["indefinite_control_weight"] = r.indefinite_control_weight;
        d["min_Q"] = r.min_Q;
        d["min_R"] = r.min_R;
        d["report"] = r.to_string();
        return d;
      },
      py::arg("coeffs"), py::arg("grid"));

  m.def(
      "solve_riccati",
      [](const CoefficientSet& c, const TimeGrid& g, std::optional<std::int64_t> n) {
        py::gil_scoped_release release;
        auto sol = n ? solve_finite_n(c, *n, g) : solve_limit(c, g);
        auto gs = gains(sol, c);
        py::gil_scoped_acquire acquire;
        return riccati_dict(sol, gs);
      },
      py::arg("coeffs"), py::arg("grid"), py::arg("N") = py::none(),
      "Limit system by default; pass N for the finite-population system.");

  m.def(
      "mean_field",
      [](const CoefficientSet& c, const TimeGrid& g, double initial) {
        const auto sol = solve_limit(c, g);
        return array(solve_mean_field(c, gains(sol, c), initial, g).values);
      },
      py::arg("coeffs"), py::arg("grid"), py::arg("initial"));

  m.def(
      "simulate_costs",
      [](const CoefficientSet& c, const TimeGrid& g, const InitialLaw& init, std::int64_t n,
         std::size_t reps, std::uint64_t seed, const std::string& law, double theta,
         std::size_t workers) {
        PopulationCostResult r;
        {
          py::gil_scoped_release release;
          const auto kind = parse_law_kind(law);
          StrategyLaw sl;
          if (kind == LawKind::centralized) {
            sl = make_law(kind, gains(solve_finite_n(c, n, g), c));
          } else {
            const auto gs = gains(solve_limit(c, g), c);
            sl = make_law(kind, gs, solve_mean_field(c, gs, init.mean(), g), theta);
          }
          PopulationConfig cfg{static_cast<std::size_t>(n), reps, seed, init, 1};
          r = population_costs(c, sl, cfg, g, false, {SolverOptions{}, workers});
        }
        py::dict d = table_dict(r.summary);
        d["population_mean"] = r.population_mean;
        d["population_stderr"] = r.population_standard_error;
        return d;
      },
      py::arg("coeffs"), py::arg("grid"), py::arg("initial"), py::arg("N"), py::arg("reps"),
      py::arg("seed"), py::arg("law") = "decentralized", py::arg("theta") = 1.0,
      py::arg("workers") = 0);

  m.def(
      "epsilon_sweep",
      [](const CoefficientSet& c, const TimeGrid& g, const InitialLaw& init,
         const std::vector<std::int64_t>& ns, std::size_t reps, std::uint64_t seed,
         std::size_t workers) {
        EpsilonSweepResult r;
        {
          py::gil_scoped_release release;
          r = epsilon_sweep(c, init, ns, reps, seed, g, {SolverOptions{}, workers});
        }
        py::dict d = table_dict(r.table);
        d["slope"] = r.slope.slope;
        d["slope_stderr"] = r.slope.slope_standard_error;
        return d;
      },
      py::arg("coeffs"), py::arg("grid"), py::arg("initial"), py::arg("Ns"), py::arg("reps"),
      py::arg("seed"), py::arg("workers") = 0);

  m.def(
      "riccati_convergence",
      [](const CoefficientSet& c, const TimeGrid& g, const std::vector<std::int64_t>& ns) {
        const auto r = riccati_convergence(c, ns, g);
        py::dict d = table_dict(r.table);
        d["slope_P"] = r.slope_P.slope;
        d["slope_K"] = r.slope_K.slope;
        d["slope_phi"] = r.slope_phi.slope;
        return d;
      },
      py::arg("coeffs"), py::arg("grid"), py::arg("Ns"));

  m.def(
      "nash_gap",
      [](const CoefficientSet& c, const TimeGrid& g, const InitialLaw& init, std::int64_t n,
         std::size_t reps, std::uint64_t seed, std::size_t workers) {
        NashGapResult r;
        {
          py::gil_scoped_release release;
          r = nash_gap(c, init, n, default_deviation_family(), reps, seed, g,
                       {SolverOptions{}, workers});
        }
        py::dict d = table_dict(r.table);
        d["max_gap"] = r.max_gap;
        d["max_gap_stderr"] = r.max_gap_standard_error;
        d["max_gap_deviation"] = r.max_gap_deviation;
        d["calibration_gap"] = r.calibration_gap;
        return d;
      },
      py::arg("coeffs"), py::arg("grid"), py::arg("initial"), py::arg("N"), py::arg("reps"),
      py::arg("seed"), py::arg("workers") = 0);

  m.def(
      "convexity_probe",
      [](const CoefficientSet& c, std::int64_t n, const TimeGrid& g, std::size_t samples,
         std::size_t inner, std::uint64_t seed) {
        ConvexityProbeResult r;
        {
          py::gil_scoped_release release;
          r = convexity_probe(c, n, g, {samples, inner, seed, 0});
        }
        py::dict d;
        d["min_value"] = r.min_value;
        d["min_stderr"] = r.min_standard_error;
        d["argmin"] = r.argmin;
        d["sample_means"] = array(r.sample_means);
        return d;
      },
      py::arg("coeffs"), py::arg("N"), py::arg("grid"), py::arg("samples") = 32,
      py::arg("inner") = 256, py::arg("seed") = 0);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        py::gil_scoped_release release;
        return cli::run(args);
      },
      py::arg("args"), "Runs the command-line tool in-process and returns its exit code.");

  m.attr("__version__") = cli::kToolVersion;
}
