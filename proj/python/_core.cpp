#include "homog/cell_problem.hpp"
#include "homog/config.hpp"
#include "homog/error.hpp"
#include "homog/experiments.hpp"
#include "homog/hj_solver.hpp"
#include "homog/operator_core.hpp"
#include "homog/parabolic.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace homog;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::array_t<double> as_array(const GridFunction& f) {
  const auto& s = f.spec();
  if (s.n == 1) return py::array_t<double>(static_cast<py::ssize_t>(f.size()), f.values().data());
  // Row index is x_2, column index is x_1 (x_1 fastest in memory).
  return py::array_t<double>({static_cast<py::ssize_t>(s.points), static_cast<py::ssize_t>(s.points)},
                             f.values().data());
}

GridFunction from_array(const GridSpec& spec, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (static_cast<std::size_t>(a.size()) != spec.size()) {
    throw Error(ErrorCode::invalid_argument, "array size does not match the grid");
  }
  return GridFunction(spec, std::vector<double>(a.data(), a.data() + a.size()));
}

py::dict trace_dict(const EvolutionTrace& tr) {
  py::list times, fields;
  for (const auto& s : tr.snapshots) {
    times.append(s.t);
    fields.append(as_array(s.field));
  }
  py::dict d;
  d["times"] = times;
  d["snapshots"] = fields;
  d["dt"] = tr.dt;
  d["steps"] = tr.steps;
  d["max_lipschitz"] = tr.summary.max_lipschitz;
  d["worst_wt_increase"] = tr.summary.worst_wt_increase;
  return d;
}

std::optional<CoercivityCertificate> certify(const ForcingField& f, double delta) {
  if (f.is_constant() && f.value_bound() == 0.0) return std::nullopt;
  return check_coercivity(f, delta, f.dimension() == 1 ? 1e-3 : 5e-3);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Forced graphical mean curvature flow: cell problems, effective equation and rate studies";

  static py::exception<Error> error(m, "HomogError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error;
      py::object inst = exc(std::string(to_string(e.code())) + ": " + e.what());
      inst.attr("code") = to_string(e.code());
      PyErr_SetObject(exc.ptr(), inst.ptr());
    }
  });

  py::class_<ForcingField>(m, "ForcingField")
      .def_static("constant", &ForcingField::constant, py::arg("n"), py::arg("c0"))
      .def_static("sinusoid", &ForcingField::sinusoid, py::arg("n"), py::arg("mean"), py::arg("amplitude"),
                  py::arg("k") = std::vector<int>{})
      .def_static(
          "parse", [](const std::string& text, int n) { return ForcingField::from_descriptor(ForceDescriptor::parse(text, n)); },
          py::arg("descriptor"), py::arg("n") = 1)
      .def_property_readonly("dimension", &ForcingField::dimension)
      .def_property_readonly("label", &ForcingField::label)
      .def_property_readonly("min", &ForcingField::sampled_min)
      .def_property_readonly("max", &ForcingField::sampled_max)
      .def("__call__", [](const ForcingField& f, const Vector& y) { return f.value(y); })
      .def("gradient", &ForcingField::gradient)
      .def("__repr__", [](const ForcingField& f) { return "<ForcingField " + f.label() + ">"; });

  py::class_<GridSpec>(m, "GridSpec")
      .def_static("torus", &GridSpec::torus, py::arg("n"), py::arg("points"))
      .def_static("box", &GridSpec::box, py::arg("n"), py::arg("points"), py::arg("half_extent"),
                  py::arg("extension_cap") = std::optional<double>{})
      .def_readonly("n", &GridSpec::n)
      .def_readonly("points", &GridSpec::points)
      .def_readonly("h", &GridSpec::h)
      .def_readonly("half_extent", &GridSpec::half_extent)
      .def_property_readonly("size", &GridSpec::size)
      .def("coordinates", [](const GridSpec& s) {
        std::vector<double> x(s.points);
        for (int i = 0; i < s.points; ++i) x[i] = s.coordinate(i);
        return x;
      });

  m.def(
      "check_coercivity",
      [](const ForcingField& f, double delta, double resolution) {
        const auto c = check_coercivity(f, delta, resolution);
        py::dict d;
        d["delta"] = c.delta;
        d["min_margin"] = c.min_margin;
        d["lipschitz_slack"] = c.lipschitz_slack;
        d["worst_point"] = c.worst_point;
        return d;
      },
      py::arg("force"), py::arg("delta"), py::arg("resolution") = 1e-3,
      "Certificate for c^2 - (n-1)|Dc| > delta; raises HomogError otherwise.");

  m.def(
      "evaluate_F",
      [](const Matrix& X, const Vector& p, double c) { return evaluate_F(X, p, c); }, py::arg("X"), py::arg("p"),
      py::arg("c"), "-tr{a(p) X} - c sqrt(1 + |p|^2)");

  m.def(
      "evolve",
      [](const ForcingField& f, const GridSpec& spec, py::array_t<double> initial, double horizon,
         std::vector<double> snapshot_times, double delta, double eps) {
        const auto u0 = from_array(spec, initial);
        EvolutionTrace tr;
        if (eps == 1.0) {
          ParabolicProblem pb;
          pb.force = f;
          pb.certificate = certify(f, delta);
          pb.initial = u0;
          pb.lipschitz_bound = discrete_lipschitz(u0);
          pb.horizon = horizon;
          pb.snapshot_times = std::move(snapshot_times);
          pb.monitor_stride = 64;
          tr = evolve(pb);
        } else {
          EpsilonOptions opt;
          opt.snapshot_times = std::move(snapshot_times);
          opt.certificate = certify(f, delta);
          opt.monitor_stride = 64;
          tr = solve_epsilon_problem(f, u0, eps, horizon, opt);
        }
        return trace_dict(tr);
      },
      py::arg("force"), py::arg("grid"), py::arg("initial"), py::arg("horizon"),
      py::arg("snapshot_times") = std::vector<double>{}, py::arg("delta") = 0.1, py::arg("eps") = 1.0,
      "Explicit flow (eps = 1) or the eps-problem; returns snapshots and monitor summaries.");

  m.def(
      "effective_value",
      [](const ForcingField& f, const Vector& p, double delta, double gradient_bound, int cell_points,
         std::vector<double> lambdas, double stop_tol) {
        const auto mf = build_modified_force(f, certify(f, delta), gradient_bound);
        CellOptions opt;
        opt.stop_tol = stop_tol;
        const auto ev = richardson_effective_value(p, mf, GridSpec::torus(f.dimension(), cell_points), lambdas, opt);
        py::dict d;
        d["value"] = ev.value;
        d["uncertainty"] = ev.uncertainty;
        d["ill_conditioned"] = ev.ill_conditioned;
        d["per_lambda"] = ev.per_lambda;
        d["corrector"] = as_array(ev.corrector.corrector);
        d["residual"] = ev.corrector.residual;
        return d;
      },
      py::arg("force"), py::arg("p"), py::arg("delta") = 0.1, py::arg("gradient_bound") = 1.0,
      py::arg("cell_points") = 256, py::arg("lambdas") = std::vector<double>{1e-2, 5e-3, 2.5e-3},
      py::arg("stop_tol") = 1e-8, "Extrapolated effective operator value at p with the corrector.");

  py::class_<EffectiveHamiltonianTable>(m, "EffectiveTable")
      .def_property_readonly("dimension", &EffectiveHamiltonianTable::dimension)
      .def_property_readonly("coverage", &EffectiveHamiltonianTable::coverage)
      .def_property_readonly("values", &EffectiveHamiltonianTable::values)
      .def_property_readonly("uncertainties", &EffectiveHamiltonianTable::uncertainties)
      .def("__call__", [](const EffectiveHamiltonianTable& t, const Vector& p) { return t.value(p.data()); })
      .def("to_csv", [](const EffectiveHamiltonianTable& t, const std::string& path) { write_table_csv(t, path); })
      .def_static("from_csv", &read_table_csv_file);

  m.def(
      "build_table",
      [](const ForcingField& f, double coverage, int samples, double delta, double gradient_bound, int cell_points,
         std::vector<double> lambdas, int jobs) {
        const auto mf = build_modified_force(f, certify(f, delta), gradient_bound);
        TableOptions opt;
        opt.jobs = jobs;
        py::gil_scoped_release release;
        return build_table(mf, coverage, samples, GridSpec::torus(f.dimension(), cell_points), lambdas, opt);
      },
      py::arg("force"), py::arg("coverage"), py::arg("samples"), py::arg("delta") = 0.1,
      py::arg("gradient_bound") = 1.0, py::arg("cell_points") = 128,
      py::arg("lambdas") = std::vector<double>{1e-2, 5e-3, 2.5e-3}, py::arg("jobs") = 1);

  m.def(
      "solve_effective",
      [](std::optional<EffectiveHamiltonianTable> table, std::optional<double> constant_force, const GridSpec& spec,
         py::array_t<double> initial, double horizon, double lipschitz_bound) {
        EffectiveProblem pb;
        if (table) {
          pb.hamiltonian = EffectiveHamiltonian::from_table(*table);
        } else {
          pb.hamiltonian = EffectiveHamiltonian::constant_force(spec.n, constant_force.value_or(0.0));
        }
        pb.initial = from_array(spec, initial);
        pb.lipschitz_bound = lipschitz_bound;
        pb.horizon = horizon;
        return trace_dict(solve_effective(pb));
      },
      py::arg("table") = py::none(), py::arg("constant_force") = py::none(), py::arg("grid"), py::arg("initial"),
      py::arg("horizon"), py::arg("lipschitz_bound"),
      "Lax-Friedrichs solve of the effective equation with a table or the constant-force closed form.");

  m.def(
      "fit_exponent",
      [](const std::vector<std::pair<double, double>>& records) {
        const auto f = fit_exponent(records);
        py::dict d;
        d["exponent"] = f.exponent;
        d["constant"] = f.constant;
        d["residuals"] = f.residuals;
        return d;
      },
      py::arg("records"), "Least squares slope of log error against log eps.");

  m.def(
      "parse_config", [](const std::string& text, const std::vector<std::string>& overrides) {
        return serialize_config(parse_config_text(text, overrides));
      },
      py::arg("text"), py::arg("overrides") = std::vector<std::string>{},
      "Validates INI text and returns the fully resolved configuration.");

  m.def(
      "rate_sweep",
      [](const std::string& text, int jobs) {
        const auto c = parse_config_text(text);
        RateReport r;
        {
          py::gil_scoped_release release;
          r = run_rate_sweep(rate_settings(c, jobs));
        }
        auto j = to_json(r);
        j["config"] = config_json(c);
        return to_python(j);
      },
      py::arg("config"), py::arg("jobs") = 1, "Runs the homogenization-rate sweep described by INI text.");

  m.def(
      "cone_experiment",
      [](const std::string& text, int jobs) {
        const auto c = parse_config_text(text);
        ConeExample ex;
        {
          py::gil_scoped_release release;
          ex = cone_experiment(cone_settings(c, jobs));
        }
        auto j = to_json(ex);
        j["config"] = config_json(c);
        return to_python(j);
      },
      py::arg("config"), py::arg("jobs") = 1, "Runs the unforced cone example described by INI text.");

  m.def(
      "monitor_suite",
      [](const std::string& text) {
        const auto c = parse_config_text(text);
        MonitorSuiteResult res;
        {
          py::gil_scoped_release release;
          res = apriori_monitor_suite(monitor_settings(c));
        }
        return to_python(to_json(res));
      },
      py::arg("config"), "Runs the a priori monitor suite described by INI text.");

  m.def("version", &version);
}
