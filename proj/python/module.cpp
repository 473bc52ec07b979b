#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "unrolldiff/datasets.hpp"
#include "unrolldiff/polynomials.hpp"
#include "unrolldiff/problems.hpp"
#include "unrolldiff/unroll.hpp"

namespace py = pybind11;
using namespace unrolldiff;

namespace {

QuadraticFamily make_ridge_py(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                              const Eigen::VectorXd& center, const Eigen::VectorXd& metric,
                              double theta_lo, double theta_hi) {
  return make_ridge(design, target, center, metric, Interval{theta_lo, theta_hi});
}

Eigen::VectorXd as_theta(double theta) { return Eigen::VectorXd::Constant(1, theta); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Jacobians of argmin solutions of parametric quadratics via unrolled differentiation";

  py::enum_<ScheduleKind>(m, "ScheduleKind")
      .value("TwoSequence", ScheduleKind::TwoSequence)
      .value("ThreeSequence", ScheduleKind::ThreeSequence);

  py::class_<StepCoeffs>(m, "StepCoeffs")
      .def_readonly("h", &StepCoeffs::h)
      .def_readonly("m", &StepCoeffs::m)
      .def_readonly("c1", &StepCoeffs::c1)
      .def_readonly("c2", &StepCoeffs::c2)
      .def_readonly("c3", &StepCoeffs::c3)
      .def_readonly("a", &StepCoeffs::a)
      .def_readonly("A", &StepCoeffs::big_a);

  py::class_<MethodSchedule>(m, "MethodSchedule")
      .def_property_readonly("kind", &MethodSchedule::kind)
      .def("at", &MethodSchedule::at, py::arg("t"));

  m.def("gd_schedule", &gd_schedule, py::arg("h"));
  m.def("gegenbauer_schedule", &gegenbauer_schedule, py::arg("alpha"), py::arg("ell"),
        py::arg("big_l"));
  m.def("chebyshev_schedule", &chebyshev_schedule, py::arg("ell"), py::arg("big_l"));
  m.def("heavy_ball_schedule", &heavy_ball_schedule, py::arg("ell"), py::arg("big_l"));
  m.def("heavy_ball_step", &heavy_ball_step, py::arg("ell"), py::arg("big_l"));
  m.def("heavy_ball_momentum", &heavy_ball_momentum, py::arg("ell"), py::arg("big_l"));
  m.def(
      "sobolev_schedule",
      [](double alpha, double eta, double ell, double big_l) {
        return sobolev_schedule({alpha, eta, ell, big_l});
      },
      py::arg("alpha"), py::arg("eta"), py::arg("ell"), py::arg("big_l"));
  m.def("sobolev_asymptotic_schedule", &sobolev_asymptotic_schedule, py::arg("ell"),
        py::arg("big_l"));

  py::class_<QuadraticFamily>(m, "QuadraticFamily")
      .def_readonly("dim_x", &QuadraticFamily::dim_x)
      .def_readonly("dim_theta", &QuadraticFamily::dim_theta)
      .def_readonly("ell", &QuadraticFamily::ell)
      .def_readonly("big_l", &QuadraticFamily::big_l)
      .def("hessian", [](const QuadraticFamily& f, double theta) { return f.hessian(as_theta(theta)); })
      .def("linear", [](const QuadraticFamily& f, double theta) { return f.linear(as_theta(theta)); });

  m.def("make_ridge", &make_ridge_py, py::arg("design"), py::arg("target"), py::arg("center"),
        py::arg("metric") = Eigen::VectorXd(), py::arg("theta_lo") = 1e-3,
        py::arg("theta_hi") = 1e-3);
  m.def("make_scalar_toy", [](double lo, double hi) { return make_scalar_toy({lo, hi}); },
        py::arg("theta_lo") = 0.5, py::arg("theta_hi") = 2.0);
  m.def("make_synthetic", &make_synthetic, py::arg("n"), py::arg("d"), py::arg("seed"));
  m.def("default_ridge_theta", &default_ridge_theta, py::arg("design"));
  m.def(
      "solve_exact",
      [](const QuadraticFamily& f, double theta) { return solve_exact(f, as_theta(theta)); },
      py::arg("family"), py::arg("theta"));
  m.def(
      "exact_jacobian",
      [](const QuadraticFamily& f, double theta) { return exact_jacobian(f, as_theta(theta)); },
      py::arg("family"), py::arg("theta"));
  m.def(
      "cross_derivative",
      [](const QuadraticFamily& f, double theta, const Eigen::VectorXd& x0,
         const Eigen::MatrixXd& jac0) { return cross_derivative(f, as_theta(theta), x0, jac0); },
      py::arg("family"), py::arg("theta"), py::arg("x0"), py::arg("jac0"));
  m.def(
      "commutativity_defect",
      [](const QuadraticFamily& f, double theta) {
        return commutativity_defect(f, as_theta(theta));
      },
      py::arg("family"), py::arg("theta"));
  m.def(
      "spectrum_bounds",
      [](const QuadraticFamily& f, double theta) { return spectrum_bounds(f, as_theta(theta)); },
      py::arg("family"), py::arg("theta"));
  m.def(
      "with_tight_bounds",
      [](const QuadraticFamily& f, double theta) {
        return with_tight_bounds(f, as_theta(theta));
      },
      py::arg("family"), py::arg("theta"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("x_star", [](const Trajectory& t) { return t.x_star; })
      .def_property_readonly("jac_star", [](const Trajectory& t) { return t.jac_star; })
      .def("__len__", [](const Trajectory& t) { return t.entries.size(); })
      .def("iterate", [](const Trajectory& t, int i) { return t.entries.at(i).x; })
      .def("jacobian", [](const Trajectory& t, int i) { return t.entries.at(i).jac; });

  py::class_<SuboptimalityCurves>(m, "SuboptimalityCurves")
      .def_readonly("f_subopt", &SuboptimalityCurves::f_subopt)
      .def_readonly("iterate_subopt", &SuboptimalityCurves::iterate_subopt)
      .def_readonly("jacobian_subopt", &SuboptimalityCurves::jacobian_subopt);

  m.def(
      "run",
      [](const QuadraticFamily& f, double theta, const MethodSchedule& s,
         const Eigen::VectorXd& x0, const Eigen::MatrixXd& jac0, int horizon) {
        return run(f, as_theta(theta), s, x0, jac0, horizon);
      },
      py::arg("family"), py::arg("theta"), py::arg("schedule"), py::arg("x0"), py::arg("jac0"),
      py::arg("horizon"));
  m.def(
      "run_zero_init",
      [](const QuadraticFamily& f, double theta, const MethodSchedule& s, int horizon) {
        return run(f, as_theta(theta), s, Eigen::VectorXd::Zero(f.dim_x),
                   Eigen::MatrixXd::Zero(f.dim_x, f.dim_theta), horizon);
      },
      py::arg("family"), py::arg("theta"), py::arg("schedule"), py::arg("horizon"));
  m.def(
      "suboptimality_curves",
      [](const Trajectory& t, const QuadraticFamily& f, double theta) {
        return suboptimality_curves(t, f, as_theta(theta));
      },
      py::arg("trajectory"), py::arg("family"), py::arg("theta"));
  m.def(
      "finite_difference_jacobian",
      [](const QuadraticFamily& f, double theta, const MethodSchedule& s,
         const Eigen::VectorXd& x0, int horizon, double eps) {
        return finite_difference_jacobian(f, as_theta(theta), s, x0, horizon, eps);
      },
      py::arg("family"), py::arg("theta"), py::arg("schedule"), py::arg("x0"), py::arg("horizon"),
      py::arg("eps") = 1e-6);
  m.def(
      "master_identity_residual",
      [](const QuadraticFamily& f, double theta, const MethodSchedule& s, int t,
         const Eigen::VectorXd& x0, const Eigen::MatrixXd& jac0) {
        return master_identity_residual(f, as_theta(theta), s, t, x0, jac0);
      },
      py::arg("family"), py::arg("theta"), py::arg("schedule"), py::arg("t"), py::arg("x0"),
      py::arg("jac0"));

  py::class_<Poly>(m, "Poly")
      .def(py::init([](std::vector<double> coeffs) { return Poly{std::move(coeffs)}; }))
      .def_readonly("coeffs", &Poly::coeffs)
      .def("degree", &Poly::degree);
  m.def("poly_eval", [](const Poly& p, double x) { return eval(p, x); }, py::arg("p"),
        py::arg("x"));
  m.def("poly_derivative", &derivative, py::arg("p"));
  m.def("residual_poly_of_schedule", &residual_poly_of_schedule, py::arg("schedule"),
        py::arg("t"));
  m.def("schedule_poly_eval", &schedule_poly_eval, py::arg("schedule"), py::arg("t"),
        py::arg("lam"));
  m.def("gegenbauer_monic", &gegenbauer_monic, py::arg("alpha"), py::arg("t"));
  m.def("sobolev_monic", &sobolev_monic, py::arg("alpha"), py::arg("eta_tilde"), py::arg("t"));
  m.def("shift_normalize", &shift_normalize, py::arg("p"), py::arg("ell"), py::arg("big_l"));

  py::class_<SobolevProductSpec>(m, "SobolevProductSpec")
      .def_static("make", &SobolevProductSpec::make, py::arg("alpha"), py::arg("eta"),
                  py::arg("ell"), py::arg("big_l"), py::arg("max_degree") = kMaxPolyDegree)
      .def_readonly("alpha", &SobolevProductSpec::alpha)
      .def_readonly("eta", &SobolevProductSpec::eta)
      .def_readonly("eta_tilde", &SobolevProductSpec::eta_tilde);
  m.def("inner_product", &inner_product, py::arg("p"), py::arg("q"), py::arg("spec"));

  py::class_<OptimalResidual>(m, "OptimalResidual")
      .def_readonly("p_star", &OptimalResidual::p_star)
      .def_readonly("a", &OptimalResidual::a)
      .def_readonly("A", &OptimalResidual::big_a);
  m.def("optimal_residual", &optimal_residual, py::arg("spec"), py::arg("t"));

  m.def("gd_bound", &gd_bound, py::arg("h"), py::arg("ell"), py::arg("big_l"), py::arg("d0"),
        py::arg("g"), py::arg("t"));
  m.def("chebyshev_bound", &chebyshev_bound, py::arg("ell"), py::arg("big_l"), py::arg("d0"),
        py::arg("g"), py::arg("t"));
  m.def("lower_bound", &lower_bound, py::arg("ell"), py::arg("big_l"), py::arg("d0"),
        py::arg("t"));
  m.def("jacobian_bound_of_poly", &jacobian_bound_of_poly, py::arg("p"), py::arg("ell"),
        py::arg("big_l"), py::arg("d0"), py::arg("g"));
  m.def("bound_curve_of_schedule", &bound_curve_of_schedule, py::arg("schedule"),
        py::arg("horizon"), py::arg("ell"), py::arg("big_l"), py::arg("d0"), py::arg("g"),
        py::arg("grid_points") = 10001);
  m.def("monotone_step_threshold", &monotone_step_threshold, py::arg("big_l"));
  m.def("average_case_bound", &average_case_bound, py::arg("spec"), py::arg("p"));

  py::class_<BurnInStats>(m, "BurnInStats")
      .def_readonly("peak_index", &BurnInStats::peak_index)
      .def_readonly("peak_value", &BurnInStats::peak_value)
      .def_readonly("burn_in_length", &BurnInStats::burn_in_length);
  m.def("burn_in_stats", &burn_in_stats, py::arg("curve"));

  py::class_<DataSet>(m, "DataSet")
      .def_readonly("features", &DataSet::features)
      .def_readonly("labels", &DataSet::labels);
  m.def("read_libsvm", &read_libsvm, py::arg("path"));
}
