#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace unrolldiff {

/// Parametric quadratic family f(x, theta) = 1/2 x'H(theta)x + b(theta)'x
/// with spectrum of H(theta) contained in [ell, big_l] over the intended
/// theta range.  All maps are pure functions of theta.
struct QuadraticFamily {
  int dim_x = 0;
  int dim_theta = 0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> linear;
  std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> hessian_jac;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> linear_jac;
  double ell = 0.0;
  double big_l = 0.0;
};

/// All family maps evaluated at a fixed theta.
struct FamilyEval {
  Eigen::MatrixXd hess;                   // H(theta), d x d
  Eigen::VectorXd lin;                    // b(theta), d
  std::vector<Eigen::MatrixXd> hess_jac;  // dH(theta), k matrices d x d
  Eigen::MatrixXd lin_jac;                // db(theta), d x k
};

FamilyEval eval_family(const QuadraticFamily& family, const Eigen::VectorXd& theta);

double objective_value(const FamilyEval& at, const Eigen::VectorXd& x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Ridge regression data: f(x, theta) = 1/2 (||Ax - y||^2 + theta ||x - c||_D^2)
/// with positive diagonal metric D (identity when empty).
struct RidgeInstance {
  Eigen::MatrixXd design;
  Eigen::VectorXd target;
  Eigen::VectorXd center;
  Eigen::VectorXd metric;
};

QuadraticFamily make_ridge(const RidgeInstance& ridge, Interval theta_range);

QuadraticFamily make_ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                           const Eigen::VectorXd& center, const Eigen::VectorXd& metric,
                           Interval theta_range);

/// Scalar family H(theta) = [theta], b = [1]; x_star = -1/theta.
QuadraticFamily make_scalar_toy(Interval theta_range = {0.5, 2.0});

/// Ridge data over an n x d standard-Gaussian design with Gaussian targets,
/// zero center and identity metric.  Deterministic for a fixed seed
/// (splitmix64 counter stream + Box-Muller, see README).
RidgeInstance make_synthetic_ridge(int n, int d, std::uint64_t seed);

/// Family built from make_synthetic_ridge with spectrum bounds taken at
/// theta = 1e-3 ||A||_2.
QuadraticFamily make_synthetic(int n, int d, std::uint64_t seed);

/// Default ridge regularization strength 1e-3 ||A||_2.
double default_ridge_theta(const Eigen::MatrixXd& design);

/// Minimizer of f(., theta); requires H(theta) positive definite.
Eigen::VectorXd solve_exact(const QuadraticFamily& family, const Eigen::VectorXd& theta);

/// Jacobian of the minimizer via implicit differentiation:
/// H J = -(dH x_star + db), columnwise over theta coordinates.
Eigen::MatrixXd exact_jacobian(const QuadraticFamily& family, const Eigen::VectorXd& theta);

/// Cross-derivative of the gradient, d_theta grad f(x0(theta), theta)
/// = dH x0 + db + H jac_x0, as a d x k matrix.
Eigen::MatrixXd cross_derivative(const QuadraticFamily& family, const Eigen::VectorXd& theta,
                                 const Eigen::VectorXd& x0, const Eigen::MatrixXd& jac_x0);

/// Frobenius norm of the cross-derivative (the G of the bound formulas).
double cross_derivative_norm(const QuadraticFamily& family, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& x0, const Eigen::MatrixXd& jac_x0);

/// Normalized commutation defect max_i ||dH_i H - H dH_i||_F / (||H||_F ||dH_i||_F + eps).
/// Zero for families whose Hessian commutes with its Jacobian.
double commutativity_defect(const QuadraticFamily& family, const Eigen::VectorXd& theta);

/// (lambda_min, lambda_max) of H(theta) by dense eigendecomposition.
std::pair<double, double> spectrum_bounds(const QuadraticFamily& family,
                                          const Eigen::VectorXd& theta, int dim_cap = 2000);

/// Copy of the family with [ell, big_l] tightened to the spectrum at theta
/// (with a one-part-in-1e12 margin so the bounds still enclose it).
QuadraticFamily with_tight_bounds(const QuadraticFamily& family, const Eigen::VectorXd& theta);

/// Deterministic standard-normal stream: splitmix64 at a counter, Box-Muller.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : seed_(seed) {}
  double next();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace unrolldiff
