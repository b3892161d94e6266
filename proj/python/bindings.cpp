#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "proxflow/cli.hpp"

namespace py = pybind11;
using namespace proxflow;

namespace {

Mat stack_rows(const std::vector<Vec>& rows, int dim) {
  Mat out(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

py::object optional_float(const std::optional<double>& x) { return x ? py::object(py::float_(*x)) : py::none(); }

py::dict report_dict(const RateReport& r) {
  py::dict d;
  d["regime"] = to_string(r.regime);
  d["theta"] = optional_float(r.theta);
  d["a1"] = optional_float(r.a1);
  d["a2"] = optional_float(r.a2);
  d["a3"] = optional_float(r.a3);
  d["a4"] = optional_float(r.a4);
  d["r2_exponential"] = r.r2_exponential;
  d["r2_polynomial"] = r.r2_polynomial;
  d["t0"] = r.t0;
  d["t1"] = r.t1;
  d["x_limit"] = r.x_limit;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Second-order proximal-gradient flow: parameters, integration, energy, rates";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Objective>(m, "Objective")
      .def_property_readonly("dim", &Objective::dim)
      .def_property_readonly("beta", &Objective::beta)
      .def("value", &Objective::value, py::arg("x"))
      .def("gradient", [](const Objective& o, const Vec& x) { return o.g->gradient(x); }, py::arg("x"))
      .def("prox", [](const Objective& o, double lam, const Vec& x) { return prox_eval(*o.f, lam, x); },
           py::arg("lam"), py::arg("x"))
      .def("prox_grad_map", [](const Objective& o, double lam, const Vec& x) { return prox_grad_map(o, lam, x); },
           py::arg("lam"), py::arg("x"))
      .def("residual", [](const Objective& o, double lam, const Vec& x) { return prox_grad_residual(o, lam, x); },
           py::arg("lam"), py::arg("x"))
      .def("criticality_distance", [](const Objective& o, const Vec& x) { return criticality_distance(o, x); },
           py::arg("x"));

  m.def("_make_problem_json", [](const std::string& text) {
    return make_problem(io::problem_spec_from_json(io::json::parse(text)));
  });

  py::class_<SystemParams>(m, "SystemParams")
      .def_readonly("gamma", &SystemParams::gamma)
      .def_readonly("lam", &SystemParams::lambda)
      .def_readonly("beta", &SystemParams::beta)
      .def_readonly("L1", &SystemParams::L1)
      .def_readonly("L2", &SystemParams::L2)
      .def_readonly("L", &SystemParams::L)
      .def_readonly("A", &SystemParams::A)
      .def_readonly("B", &SystemParams::B)
      .def_readonly("C", &SystemParams::C)
      .def_readonly("c", &SystemParams::c)
      .def_readonly("a", &SystemParams::a_const)
      .def_readonly("b", &SystemParams::b_const)
      .def_readonly("s", &SystemParams::s)
      .def_readonly("p", &SystemParams::p)
      .def_readonly("rho_feasible", &SystemParams::rho_feasible)
      .def_readonly("corollary_feasible", &SystemParams::corollary_feasible)
      .def_property_readonly("m", [](const SystemParams& p) { return p.envelope ? py::object(py::float_(p.envelope->m)) : py::none(); })
      .def_property_readonly("r0", [](const SystemParams& p) { return p.envelope ? py::object(py::float_(p.envelope->r0)) : py::none(); })
      .def("to_json", [](const SystemParams& p) { return io::params_to_json(p).dump(); });

  m.def("derive_params", &derive_params, py::arg("gamma"), py::arg("lam"), py::arg("beta"));
  m.def("lipschitz_l1", &lipschitz_l1, py::arg("gamma"), py::arg("lambda_beta"));
  m.def("lipschitz_l2", &lipschitz_l2, py::arg("gamma"), py::arg("lambda_beta"));
  m.def("corollary_check", &corollary_check, py::arg("gamma"), py::arg("lam"), py::arg("beta"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("times", [](const Trajectory& t) { return to_vec(t.times); })
      .def_property_readonly("xs", [](const Trajectory& t) { return stack_rows(t.xs, t.dim()); })
      .def_property_readonly("vs", [](const Trajectory& t) { return stack_rows(t.vs, t.dim()); })
      .def_property_readonly("accs", [](const Trajectory& t) { return stack_rows(t.accs, t.dim()); })
      .def_readonly("params", &Trajectory::params)
      .def_readonly("step", &Trajectory::step)
      .def_readonly("sample_every", &Trajectory::sample_every)
      .def("__len__", &Trajectory::size)
      .def("to_csv", [](const Trajectory& t) {
        std::ostringstream ss;
        io::write_trajectory_csv(ss, t);
        return ss.str();
      });

  m.def("integrate", &integrate, py::arg("objective"), py::arg("params"), py::arg("u0"), py::arg("v0"),
        py::arg("t_end"), py::arg("h"), py::arg("sample_every") = 0);
  m.def("trajectory_from_csv", [](const std::string& text) {
    std::istringstream ss(text);
    return io::read_trajectory_csv(ss);
  });

  py::class_<EnergyTrace>(m, "EnergyTrace")
      .def_property_readonly("times", [](const EnergyTrace& e) { return to_vec(e.times); })
      .def_property_readonly("energy", [](const EnergyTrace& e) { return to_vec(e.energy); })
      .def_property_readonly("residual", [](const EnergyTrace& e) { return to_vec(e.residual); })
      .def_property_readonly("dissipation", [](const EnergyTrace& e) { return to_vec(e.dissipation); })
      .def("__len__", &EnergyTrace::size);

  m.def("monitor", &monitor, py::arg("objective"), py::arg("params"), py::arg("trajectory"));
  m.def("energy_violations", [](const EnergyTrace& e, double tol) { return check_monotone(e, tol).size(); },
        py::arg("trace"), py::arg("tol"));

  m.def("classify_rate",
        [](const Trajectory& t, std::optional<Vec> x_limit, std::optional<double> t0, double converged_tol) {
          ClassifyOptions options;
          options.t0 = t0;
          options.converged_tol = converged_tol;
          return report_dict(classify_rate(t, x_limit, options));
        },
        py::arg("trajectory"), py::arg("x_limit") = py::none(), py::arg("t0") = py::none(),
        py::arg("converged_tol") = 1e-6);

  m.def("run_inertial",
        [](const Objective& o, double lam, double gamma, const Vec& x0, const Vec& x1, std::size_t max_iter,
           double tol) {
          const IterateHistory h = run_inertial(o, lam, constant_gamma(gamma), x0, x1, max_iter, tol);
          py::dict d;
          d["x"] = h.xs.back();
          d["converged"] = h.converged;
          d["iterations"] = h.iterations;
          d["residuals"] = to_vec(h.residuals);
          d["objective_values"] = to_vec(h.objective_values);
          return d;
        },
        py::arg("objective"), py::arg("lam"), py::arg("gamma"), py::arg("x0"), py::arg("x1"),
        py::arg("max_iter") = 10000, py::arg("tol") = 1e-8);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli::main_entry(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
