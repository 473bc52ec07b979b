#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "unrolldiff/problems.hpp"

namespace testutil {

// Chebyshev polynomial of the first kind by its three-term recurrence.
inline double cheb_t(int t, double x) {
  double prev = 1.0, cur = x;
  if (t == 0) return prev;
  for (int s = 2; s <= t; ++s) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Shifted, residual-normalized Chebyshev value C_t(lambda) on [ell, big_l].
inline double shifted_chebyshev(int t, double lambda, double ell, double big_l) {
  const double m = (2.0 * lambda - big_l - ell) / (big_l - ell);
  const double m0 = -(big_l + ell) / (big_l - ell);
  return cheb_t(t, m) / cheb_t(t, m0);
}

// Even moments of (1-x^2)^(alpha-1/2) on [-1,1], by the Beta-function ratio
// recurrence; independent of the library quadrature.
inline double weight_moment(double alpha, int k) {
  if (k % 2 == 1) return 0.0;
  double m = std::sqrt(std::numbers::pi) * std::tgamma(alpha + 0.5) / std::tgamma(alpha + 1.0);
  for (int j = 1; 2 * j <= k; ++j) m *= (j - 0.5) / (j + alpha);
  return m;
}

// Monic orthogonal polynomials for the weight above via Gram-Schmidt on the
// monomial basis, using exact moments only.  Row t holds the coefficients of
// the degree-t polynomial.
inline std::vector<std::vector<double>> gram_schmidt_monic(double alpha, int t_max) {
  std::vector<std::vector<double>> polys;
  auto ip = [&](const std::vector<double>& p, const std::vector<double>& q) {
    double acc = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      for (size_t j = 0; j < q.size(); ++j) {
        acc += p[i] * q[j] * weight_moment(alpha, static_cast<int>(i + j));
      }
    }
    return acc;
  };
  for (int t = 0; t <= t_max; ++t) {
    std::vector<double> p(t + 1, 0.0);
    p[t] = 1.0;  // x^t
    for (int j = 0; j < t; ++j) {
      const double coef = ip(p, polys[j]) / ip(polys[j], polys[j]);
      for (size_t i = 0; i < polys[j].size(); ++i) p[i] -= coef * polys[j][i];
    }
    polys.push_back(p);
  }
  return polys;
}

// theta-independent quadratic family with fixed Hessian and linear term.
inline unrolldiff::QuadraticFamily constant_family(const Eigen::MatrixXd& h,
                                                   const Eigen::VectorXd& b, double ell,
                                                   double big_l) {
  unrolldiff::QuadraticFamily family;
  family.dim_x = static_cast<int>(h.rows());
  family.dim_theta = 1;
  family.ell = ell;
  family.big_l = big_l;
  family.hessian = [h](const Eigen::VectorXd&) { return h; };
  family.linear = [b](const Eigen::VectorXd&) { return b; };
  family.hessian_jac = [d = h.rows()](const Eigen::VectorXd&) {
    return std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Zero(d, d)};
  };
  family.linear_jac = [d = h.rows()](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(d, 1);
  };
  return family;
}

inline Eigen::VectorXd scalar_theta(double value) {
  return Eigen::VectorXd::Constant(1, value);
}

}  // namespace testutil
