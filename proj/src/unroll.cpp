#include "unrolldiff/unroll.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "unrolldiff/polynomials.hpp"

namespace unrolldiff {

namespace {

// Value updates shared verbatim by the coupled and the value-only paths, so
// both produce bit-identical iterates.
Eigen::VectorXd momentum_value(const StepCoeffs& c, const FamilyEval& at,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& x_prev) {
  return x + c.m * (x - x_prev) - c.h * (at.hess * x + at.lin);
}

Eigen::VectorXd combine_value(const StepCoeffs& c, const Eigen::VectorXd& z_prev,
                              const Eigen::VectorXd& y_new, const Eigen::VectorXd& y_prev) {
  return c.c1 * z_prev + c.c2 * y_new - c.c3 * y_prev;
}

Eigen::VectorXd average_value(const StepCoeffs& c, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z_new) {
  const double w = c.a / c.big_a;
  return (1.0 - w) * x + w * z_new;
}

// d/dtheta of grad f(x(theta), theta) = dH x + H dx + db, columnwise in theta.
Eigen::MatrixXd grad_cross_jac(const FamilyEval& at, const Eigen::VectorXd& x,
                               const Eigen::MatrixXd& jac) {
  Eigen::MatrixXd out(jac.rows(), jac.cols());
  for (int i = 0; i < jac.cols(); ++i) {
    out.col(i) = at.hess_jac[i] * x + at.hess * jac.col(i) + at.lin_jac.col(i);
  }
  return out;
}

Eigen::MatrixXd momentum_jac(const StepCoeffs& c, const FamilyEval& at, const SeqPair& s,
                             const SeqPair& s_prev) {
  return s.jac + c.m * (s.jac - s_prev.jac) - c.h * grad_cross_jac(at, s.value, s.jac);
}

JointState step_at(const FamilyEval& at, const MethodSchedule& schedule, const JointState& state) {
  JointState next;
  next.t = state.t + 1;
  const StepCoeffs c = schedule.at(next.t);

  if (schedule.kind() == ScheduleKind::TwoSequence) {
    if (state.aux_y || state.aux_z) {
      throw std::invalid_argument("two-sequence schedule applied to a three-sequence state");
    }
    next.x.value = momentum_value(c, at, state.x.value, state.x_prev.value);
    next.x.jac = momentum_jac(c, at, state.x, state.x_prev);
    next.x_prev = state.x;
    return next;
  }

  JointState seeded;
  const JointState* cur = &state;
  if (!state.aux_y) {
    if (state.t != 0) {
      throw std::invalid_argument("three-sequence state lacks auxiliary sequences");
    }
    seeded = state;
    seeded.aux_y = LaggedSeq{state.x, state.x};
    seeded.aux_z = LaggedSeq{state.x, state.x};
    cur = &seeded;
  }
  const LaggedSeq& y = *cur->aux_y;
  const LaggedSeq& z = *cur->aux_z;

  SeqPair y_new;
  y_new.value = momentum_value(c, at, y.cur.value, y.prev.value);
  y_new.jac = momentum_jac(c, at, y.cur, y.prev);

  SeqPair z_new;
  z_new.value = combine_value(c, z.prev.value, y_new.value, y.prev.value);
  z_new.jac = c.c1 * z.prev.jac + c.c2 * y_new.jac - c.c3 * y.prev.jac;

  next.x.value = average_value(c, cur->x.value, z_new.value);
  {
    const double w = c.a / c.big_a;
    next.x.jac = (1.0 - w) * cur->x.jac + w * z_new.jac;
  }
  next.x_prev = cur->x;
  next.aux_y = LaggedSeq{y_new, y.cur};
  next.aux_z = LaggedSeq{z_new, z.cur};
  return next;
}

}  // namespace

JointState init_state(const QuadraticFamily& family, const Eigen::VectorXd& x0,
                      const Eigen::MatrixXd& jac0) {
  if (x0.size() != family.dim_x || jac0.rows() != family.dim_x ||
      jac0.cols() != family.dim_theta) {
    throw std::invalid_argument("init_state: shape mismatch");
  }
  JointState state;
  state.x = SeqPair{x0, jac0};
  state.x_prev = state.x;
  return state;
}

JointState init_state(const QuadraticFamily& family) {
  return init_state(family, Eigen::VectorXd::Zero(family.dim_x),
                    Eigen::MatrixXd::Zero(family.dim_x, family.dim_theta));
}

JointState step(const QuadraticFamily& family, const Eigen::VectorXd& theta,
                const MethodSchedule& schedule, const JointState& state) {
  return step_at(eval_family(family, theta), schedule, state);
}

Trajectory run(const QuadraticFamily& family, const Eigen::VectorXd& theta,
               const MethodSchedule& schedule, const Eigen::VectorXd& x0,
               const Eigen::MatrixXd& jac0, int horizon) {
  if (horizon < 0) throw std::invalid_argument("run requires horizon >= 0");
  const FamilyEval at = eval_family(family, theta);
  Trajectory traj;
  traj.entries.reserve(horizon + 1);
  traj.x_star = solve_exact(family, theta);
  traj.jac_star = exact_jacobian(family, theta);
  JointState state = init_state(family, x0, jac0);
  traj.entries.push_back({0, state.x.value, state.x.jac});
  for (int t = 1; t <= horizon; ++t) {
    state = step_at(at, schedule, state);
    traj.entries.push_back({t, state.x.value, state.x.jac});
  }
  return traj;
}

std::vector<Eigen::VectorXd> run_values(const QuadraticFamily& family,
                                        const Eigen::VectorXd& theta,
                                        const MethodSchedule& schedule,
                                        const Eigen::VectorXd& x0, int horizon) {
  if (horizon < 0) throw std::invalid_argument("run_values requires horizon >= 0");
  const FamilyEval at = eval_family(family, theta);
  std::vector<Eigen::VectorXd> path;
  path.reserve(horizon + 1);
  path.push_back(x0);
  if (schedule.kind() == ScheduleKind::TwoSequence) {
    Eigen::VectorXd x = x0, x_prev = x0;
    for (int t = 1; t <= horizon; ++t) {
      const StepCoeffs c = schedule.at(t);
      Eigen::VectorXd x_new = momentum_value(c, at, x, x_prev);
      x_prev = std::move(x);
      x = std::move(x_new);
      path.push_back(x);
    }
    return path;
  }
  Eigen::VectorXd x = x0, y = x0, y_prev = x0, z = x0, z_prev = x0;
  for (int t = 1; t <= horizon; ++t) {
    const StepCoeffs c = schedule.at(t);
    Eigen::VectorXd y_new = momentum_value(c, at, y, y_prev);
    Eigen::VectorXd z_new = combine_value(c, z_prev, y_new, y_prev);
    x = average_value(c, x, z_new);
    y_prev = std::move(y);
    y = std::move(y_new);
    z_prev = std::move(z);
    z = std::move(z_new);
    path.push_back(x);
  }
  return path;
}

SuboptimalityCurves suboptimality_curves(const Trajectory& traj, const QuadraticFamily& family,
                                         const Eigen::VectorXd& theta) {
  if (traj.entries.empty()) throw std::invalid_argument("suboptimality_curves: empty trajectory");
  const FamilyEval at = eval_family(family, theta);
  const double f_star = objective_value(at, traj.x_star);
  SuboptimalityCurves curves;
  curves.f_subopt.reserve(traj.entries.size());
  curves.iterate_subopt.reserve(traj.entries.size());
  curves.jacobian_subopt.reserve(traj.entries.size());
  for (const TrajectoryEntry& e : traj.entries) {
    curves.f_subopt.push_back(objective_value(at, e.x) - f_star);
    curves.iterate_subopt.push_back((e.x - traj.x_star).norm());
    curves.jacobian_subopt.push_back((e.jac - traj.jac_star).norm());
  }
  return curves;
}

Eigen::MatrixXd finite_difference_jacobian(const QuadraticFamily& family,
                                           const Eigen::VectorXd& theta,
                                           const MethodSchedule& schedule,
                                           const Eigen::VectorXd& x0, int horizon, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("finite_difference_jacobian requires eps > 0");
  Eigen::MatrixXd jac(family.dim_x, family.dim_theta);
  for (int i = 0; i < family.dim_theta; ++i) {
    const double h = eps * (1.0 + std::abs(theta[i]));
    Eigen::VectorXd theta_plus = theta, theta_minus = theta;
    theta_plus[i] += h;
    theta_minus[i] -= h;
    const Eigen::VectorXd x_plus = run_values(family, theta_plus, schedule, x0, horizon).back();
    const Eigen::VectorXd x_minus = run_values(family, theta_minus, schedule, x0, horizon).back();
    jac.col(i) = (x_plus - x_minus) / (2.0 * h);
  }
  return jac;
}

double master_identity_residual(const QuadraticFamily& family, const Eigen::VectorXd& theta,
                                const MethodSchedule& schedule, int t, const Eigen::VectorXd& x0,
                                const Eigen::MatrixXd& jac0) {
  if (t < 0) throw std::invalid_argument("master_identity_residual requires t >= 0");
  const double defect = commutativity_defect(family, theta);
  if (defect > 1e-10) {
    throw std::invalid_argument(
        "master_identity_residual: family violates the commutation assumption (defect " +
        std::to_string(defect) + ")");
  }
  const FamilyEval at = eval_family(family, theta);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(at.hess);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("master_identity_residual: eigendecomposition failed");
  }
  const Eigen::MatrixXd& q = es.eigenvectors();
  Eigen::VectorXd poly_q(family.dim_x), poly_d(family.dim_x);
  for (int i = 0; i < family.dim_x; ++i) {
    const auto [value, deriv] = schedule_poly_eval(schedule, t, es.eigenvalues()[i]);
    poly_q[i] = value - es.eigenvalues()[i] * deriv;  // P_t - lambda P_t'
    poly_d[i] = deriv;
  }

  const Eigen::MatrixXd jac_star = exact_jacobian(family, theta);
  const Eigen::MatrixXd cross = cross_derivative(family, theta, x0, jac0);
  const Eigen::MatrixXd predicted =
      q * (poly_q.asDiagonal() * (q.transpose() * (jac0 - jac_star))) +
      q * (poly_d.asDiagonal() * (q.transpose() * cross));

  const Trajectory traj = run(family, theta, schedule, x0, jac0, t);
  const Eigen::MatrixXd actual = traj.entries.back().jac - jac_star;
  return (actual - predicted).norm() / (1.0 + jac_star.norm());
}

void write_trajectory_csv(const std::string& path, const SuboptimalityCurves& curves,
                          const std::string& metadata_json) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "# " << metadata_json << "\n";
  out << "t,f_subopt,iterate_subopt,jacobian_subopt\n";
  char buf[3 * 32 + 16];
  for (size_t t = 0; t < curves.f_subopt.size(); ++t) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", t, curves.f_subopt[t],
                  curves.iterate_subopt[t], curves.jacobian_subopt[t]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace unrolldiff
