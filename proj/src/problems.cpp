#include "unrolldiff/problems.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace unrolldiff {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Eigen::LLT<Eigen::MatrixXd> factor_spd(const Eigen::MatrixXd& h) {
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("Hessian is not positive definite (Cholesky failed)");
  }
  return llt;
}

// One step of iterative refinement keeps the stationarity residual near
// machine level on badly conditioned instances.
Eigen::VectorXd solve_refined(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& h,
                              const Eigen::VectorXd& rhs) {
  Eigen::VectorXd x = llt.solve(rhs);
  x += llt.solve(rhs - h * x);
  return x;
}

}  // namespace

FamilyEval eval_family(const QuadraticFamily& family, const Eigen::VectorXd& theta) {
  require(theta.size() == family.dim_theta, "theta dimension mismatch");
  FamilyEval at;
  at.hess = family.hessian(theta);
  at.lin = family.linear(theta);
  at.hess_jac = family.hessian_jac(theta);
  at.lin_jac = family.linear_jac(theta);
  require(at.hess.rows() == family.dim_x && at.hess.cols() == family.dim_x,
          "hessian shape mismatch");
  require(at.lin.size() == family.dim_x, "linear term shape mismatch");
  require(static_cast<int>(at.hess_jac.size()) == family.dim_theta,
          "hessian_jac must have one matrix per theta coordinate");
  require(at.lin_jac.rows() == family.dim_x && at.lin_jac.cols() == family.dim_theta,
          "linear_jac shape mismatch");
  const double sym = (at.hess - at.hess.transpose()).norm();
  if (sym > 1e-12 * std::max(1.0, at.hess.norm())) {
    throw std::runtime_error("H(theta) is not symmetric");
  }
  return at;
}

double objective_value(const FamilyEval& at, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(at.hess * x) + at.lin.dot(x);
}

QuadraticFamily make_ridge(const RidgeInstance& ridge, Interval theta_range) {
  const auto n = ridge.design.rows();
  const auto d = ridge.design.cols();
  require(n > 0 && d > 0, "make_ridge: empty design matrix");
  require(ridge.target.size() == n, "make_ridge: target length must match rows of design");
  require(ridge.center.size() == d, "make_ridge: center length must match cols of design");
  Eigen::VectorXd metric = ridge.metric;
  if (metric.size() == 0) metric = Eigen::VectorXd::Ones(d);
  require(metric.size() == d, "make_ridge: metric length must match cols of design");
  require((metric.array() > 0.0).all(), "make_ridge: metric entries must be positive");
  require(theta_range.lo > 0.0 && theta_range.lo <= theta_range.hi,
          "make_ridge: theta range must be a subset of (0, inf)");

  const Eigen::MatrixXd gram = ridge.design.transpose() * ridge.design;
  const Eigen::VectorXd aty = ridge.design.transpose() * ridge.target;
  const Eigen::VectorXd d_center = metric.cwiseProduct(ridge.center);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double gram_min = es.eigenvalues().minCoeff();
  const double gram_max = es.eigenvalues().maxCoeff();

  QuadraticFamily family;
  family.dim_x = static_cast<int>(d);
  family.dim_theta = 1;
  family.ell = gram_min + theta_range.lo * metric.minCoeff();
  family.big_l = gram_max + theta_range.hi * metric.maxCoeff();
  family.hessian = [gram, metric](const Eigen::VectorXd& theta) -> Eigen::MatrixXd {
    Eigen::MatrixXd h = gram;
    h.diagonal() += theta[0] * metric;
    return h;
  };
  family.linear = [aty, d_center](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
    return -aty - theta[0] * d_center;
  };
  family.hessian_jac = [metric](const Eigen::VectorXd&) -> std::vector<Eigen::MatrixXd> {
    return {Eigen::MatrixXd(metric.asDiagonal())};
  };
  family.linear_jac = [d_center](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    return -d_center;
  };
  return family;
}

QuadraticFamily make_ridge(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                           const Eigen::VectorXd& center, const Eigen::VectorXd& metric,
                           Interval theta_range) {
  return make_ridge(RidgeInstance{design, target, center, metric}, theta_range);
}

QuadraticFamily make_scalar_toy(Interval theta_range) {
  require(theta_range.lo > 0.0 && theta_range.lo <= theta_range.hi,
          "make_scalar_toy: theta range must be a subset of (0, inf)");
  QuadraticFamily family;
  family.dim_x = 1;
  family.dim_theta = 1;
  family.ell = theta_range.lo;
  family.big_l = theta_range.hi;
  family.hessian = [](const Eigen::VectorXd& theta) {
    return Eigen::MatrixXd::Constant(1, 1, theta[0]);
  };
  family.linear = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Ones(1); };
  family.hessian_jac = [](const Eigen::VectorXd&) {
    return std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Ones(1, 1)};
  };
  family.linear_jac = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1); };
  return family;
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const auto mix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  };
  const auto uniform = [&](std::uint64_t i) {
    // (0, 1]: 53 mantissa bits, never zero so log() below is safe.
    return ((mix(seed_ + i * 0x9E3779B97F4A7C15ull) >> 11) + 1.0) * 0x1.0p-53;
  };
  const double u1 = uniform(++counter_);
  const double u2 = uniform(++counter_);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  have_spare_ = true;
  return r * std::cos(phi);
}

double default_ridge_theta(const Eigen::MatrixXd& design) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
  return 1e-3 * svd.singularValues()[0];
}

RidgeInstance make_synthetic_ridge(int n, int d, std::uint64_t seed) {
  require(n >= 1 && d >= 1, "make_synthetic_ridge requires n, d >= 1");
  GaussianStream stream(seed);
  Eigen::MatrixXd design(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) design(i, j) = stream.next();
  }
  Eigen::VectorXd target(n);
  for (int i = 0; i < n; ++i) target[i] = stream.next();
  return RidgeInstance{std::move(design), std::move(target), Eigen::VectorXd::Zero(d),
                       Eigen::VectorXd()};
}

QuadraticFamily make_synthetic(int n, int d, std::uint64_t seed) {
  RidgeInstance ridge = make_synthetic_ridge(n, d, seed);
  const double theta = default_ridge_theta(ridge.design);
  return make_ridge(ridge, Interval{theta, theta});
}

Eigen::VectorXd solve_exact(const QuadraticFamily& family, const Eigen::VectorXd& theta) {
  const FamilyEval at = eval_family(family, theta);
  const auto llt = factor_spd(at.hess);
  return solve_refined(llt, at.hess, -at.lin);
}

Eigen::MatrixXd exact_jacobian(const QuadraticFamily& family, const Eigen::VectorXd& theta) {
  const FamilyEval at = eval_family(family, theta);
  const auto llt = factor_spd(at.hess);
  const Eigen::VectorXd x_star = solve_refined(llt, at.hess, -at.lin);
  Eigen::MatrixXd jac(family.dim_x, family.dim_theta);
  for (int i = 0; i < family.dim_theta; ++i) {
    jac.col(i) = solve_refined(llt, at.hess, -(at.hess_jac[i] * x_star + at.lin_jac.col(i)));
  }
  return jac;
}

Eigen::MatrixXd cross_derivative(const QuadraticFamily& family, const Eigen::VectorXd& theta,
                                 const Eigen::VectorXd& x0, const Eigen::MatrixXd& jac_x0) {
  const FamilyEval at = eval_family(family, theta);
  require(x0.size() == family.dim_x, "cross_derivative: x0 shape mismatch");
  require(jac_x0.rows() == family.dim_x && jac_x0.cols() == family.dim_theta,
          "cross_derivative: jac_x0 shape mismatch");
  Eigen::MatrixXd out(family.dim_x, family.dim_theta);
  for (int i = 0; i < family.dim_theta; ++i) {
    out.col(i) = at.hess_jac[i] * x0 + at.lin_jac.col(i) + at.hess * jac_x0.col(i);
  }
  return out;
}

double cross_derivative_norm(const QuadraticFamily& family, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& x0, const Eigen::MatrixXd& jac_x0) {
  return cross_derivative(family, theta, x0, jac_x0).norm();
}

double commutativity_defect(const QuadraticFamily& family, const Eigen::VectorXd& theta) {
  const FamilyEval at = eval_family(family, theta);
  const double h_norm = at.hess.norm();
  double worst = 0.0;
  for (const Eigen::MatrixXd& dh : at.hess_jac) {
    const double num = (dh * at.hess - at.hess * dh).norm();
    const double den = h_norm * dh.norm() + std::numeric_limits<double>::min();
    worst = std::max(worst, num / den);
  }
  return worst;
}

std::pair<double, double> spectrum_bounds(const QuadraticFamily& family,
                                          const Eigen::VectorXd& theta, int dim_cap) {
  if (family.dim_x > dim_cap) {
    throw std::invalid_argument("spectrum_bounds: dimension exceeds the dense eigensolver cap");
  }
  const FamilyEval at = eval_family(family, theta);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(at.hess, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

QuadraticFamily with_tight_bounds(const QuadraticFamily& family, const Eigen::VectorXd& theta) {
  const auto [lo, hi] = spectrum_bounds(family, theta);
  QuadraticFamily tightened = family;
  tightened.ell = lo * (1.0 - 1e-12);
  tightened.big_l = hi * (1.0 + 1e-12);
  return tightened;
}

}  // namespace unrolldiff
