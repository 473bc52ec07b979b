#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "unrolldiff/methods.hpp"
#include "unrolldiff/problems.hpp"

namespace unrolldiff {

/// A sequence value together with its Jacobian with respect to theta.
struct SeqPair {
  Eigen::VectorXd value;
  Eigen::MatrixXd jac;
};

struct LaggedSeq {
  SeqPair cur;
  SeqPair prev;
};

/// Coupled iterate/Jacobian state of an unrolled run.  Two-sequence methods
/// keep one lag of the main sequence; three-sequence methods carry the
/// auxiliary y- and z-sequences with one lag each.
struct JointState {
  int t = 0;
  SeqPair x;
  SeqPair x_prev;
  std::optional<LaggedSeq> aux_y;
  std::optional<LaggedSeq> aux_z;
};

JointState init_state(const QuadraticFamily& family, const Eigen::VectorXd& x0,
                      const Eigen::MatrixXd& jac0);

/// Default zero-initialized state (x0 = 0, jac0 = 0).
JointState init_state(const QuadraticFamily& family);

/// Advances the coupled state by one iteration of the schedule.  The value
/// update and its formally differentiated twin are applied together; the
/// Jacobian propagation never feeds back into the value path.
JointState step(const QuadraticFamily& family, const Eigen::VectorXd& theta,
                const MethodSchedule& schedule, const JointState& state);

struct TrajectoryEntry {
  int t = 0;
  Eigen::VectorXd x;
  Eigen::MatrixXd jac;
};

struct Trajectory {
  std::vector<TrajectoryEntry> entries;  // t = 0 .. horizon
  Eigen::VectorXd x_star;
  Eigen::MatrixXd jac_star;
};

Trajectory run(const QuadraticFamily& family, const Eigen::VectorXd& theta,
               const MethodSchedule& schedule, const Eigen::VectorXd& x0,
               const Eigen::MatrixXd& jac0, int horizon);

/// Value-only unrolled run; returns the iterates x_0 .. x_horizon.  Produces
/// bit-identical iterates to the coupled run.
std::vector<Eigen::VectorXd> run_values(const QuadraticFamily& family,
                                        const Eigen::VectorXd& theta,
                                        const MethodSchedule& schedule,
                                        const Eigen::VectorXd& x0, int horizon);

struct SuboptimalityCurves {
  std::vector<double> f_subopt;         // f(x_t) - f(x_star)
  std::vector<double> iterate_subopt;   // ||x_t - x_star||_2
  std::vector<double> jacobian_subopt;  // ||J_t - J_star||_F
};

SuboptimalityCurves suboptimality_curves(const Trajectory& traj, const QuadraticFamily& family,
                                         const Eigen::VectorXd& theta);

/// Central-difference Jacobian of the value-only unrolled iterate at the
/// horizon, step eps*(1+|theta_i|) per coordinate.  Independent oracle for
/// the forward-mode propagation.
Eigen::MatrixXd finite_difference_jacobian(const QuadraticFamily& family,
                                           const Eigen::VectorXd& theta,
                                           const MethodSchedule& schedule,
                                           const Eigen::VectorXd& x0, int horizon,
                                           double eps = 1e-6);

/// Residual of the exact Jacobian-error identity
///   J_t - J_star = (P_t(H) - P_t'(H) H)(J_0 - J_star) + P_t'(H) d_theta grad f(x0),
/// evaluated spectrally and compared against the unrolled J_t, normalized by
/// 1 + ||J_star||_F.  Requires a commuting family (defect <= 1e-10).
double master_identity_residual(const QuadraticFamily& family, const Eigen::VectorXd& theta,
                                const MethodSchedule& schedule, int t, const Eigen::VectorXd& x0,
                                const Eigen::MatrixXd& jac0);

/// Writes the curve table as CSV with a one-line `# {json}` metadata header;
/// floats carry 17 significant digits so reruns are byte-identical.
void write_trajectory_csv(const std::string& path, const SuboptimalityCurves& curves,
                          const std::string& metadata_json);

}  // namespace unrolldiff
