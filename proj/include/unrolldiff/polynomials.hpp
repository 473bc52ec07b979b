#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "unrolldiff/methods.hpp"

namespace unrolldiff {

/// Dense univariate polynomial, coefficients in ascending degree order.
/// An empty coefficient list is the canonical zero polynomial.
struct Poly {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// Coefficient representations above this degree are refused: monomial
/// coefficients of shifted Chebyshev/Sobolev polynomials lose precision
/// beyond it.  Pointwise recurrence evaluation handles larger t.
inline constexpr int kMaxPolyDegree = 60;

double eval(const Poly& p, double lambda);
Poly derivative(const Poly& p);

/// (p(lambda), p'(lambda)) evaluated jointly from the original coefficients
/// in compensated arithmetic; avoids the rounding of explicit derivative
/// coefficients, which matters for high-degree monomial representations.
std::pair<double, double> eval_with_derivative(const Poly& p, double lambda);

/// Residual polynomial P_t of a schedule, built by running the method's
/// recurrence on coefficient vectors; P_t(0) = 1.  Requires t <= kMaxPolyDegree.
Poly residual_poly_of_schedule(const MethodSchedule& schedule, int t);

/// Streams (P_t(lambda), P_t'(lambda)) for a fixed lambda by the method's own
/// recurrence.  Stable at any t, unlike the monomial representation.
class SchedulePointwise {
 public:
  SchedulePointwise(MethodSchedule schedule, double lambda);

  void advance();
  int t() const { return t_; }
  double value() const { return x_; }
  double deriv() const { return xd_; }

 private:
  MethodSchedule schedule_;
  double lambda_;
  int t_ = 0;
  bool three_ = false;
  double x_ = 1.0, xd_ = 0.0;
  double g_ = 1.0, g_prev_ = 1.0, gd_ = 0.0, gd_prev_ = 0.0;
  double z_ = 1.0, z_prev_ = 1.0, zd_ = 0.0, zd_prev_ = 0.0;
};

/// (P_t(lambda), P_t'(lambda)) for the schedule's residual polynomial.
std::pair<double, double> schedule_poly_eval(const MethodSchedule& schedule, int t, double lambda);

/// Monic orthogonal polynomial for the weight (1-x^2)^(alpha-1/2) on [-1,1].
Poly gegenbauer_monic(double alpha, int t);

/// Monic Sobolev-orthogonal polynomial for the same weight with derivative
/// penalty eta_tilde, built from the Gegenbauer family by the two-lag coupling
/// S_t = d_{t-2} S_{t-2} + G_t - xi_{t-2} G_{t-2}.
Poly sobolev_monic(double alpha, double eta_tilde, int t);

/// Maps p on [-1,1] to the residual-normalized polynomial
/// lambda -> p(m(lambda)) / p(m(0)) on [ell, big_l], m(lambda) = (2*lambda-L-l)/(L-l).
Poly shift_normalize(const Poly& p, double ell, double big_l);

/// Sobolev inner product specification: weight (1-x^2)^(alpha-1/2) mapped onto
/// [ell, big_l], derivative penalty eta on that scale, and a Gauss rule on the
/// reference interval.  The measure is normalized so that <1,1> equals the
/// total weight mass integral over [-1,1].
struct SobolevProductSpec {
  double alpha = 1.0;
  double eta = 0.0;
  double ell = 0.0;
  double big_l = 0.0;
  double eta_tilde = 0.0;           // sigma1^2 * eta
  Eigen::VectorXd nodes;            // Gauss nodes on [-1,1]
  Eigen::VectorXd weights;

  /// Rule exact for integrands up to degree 2*max_degree + 7.
  static SobolevProductSpec make(double alpha, double eta, double ell, double big_l,
                                 int max_degree = kMaxPolyDegree);
};

/// Gauss nodes and weights for the weight (1-x^2)^(alpha-1/2) on [-1,1],
/// exact for polynomials of degree <= 2n-1.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_gegenbauer(double alpha, int n);

/// Exact moment integral of x^k against the weight (1-x^2)^(alpha-1/2) on [-1,1].
double gegenbauer_moment(double alpha, int k);

/// <p,q> = int p q dmu + eta int p' q' dmu over [ell, big_l].
double inner_product(const Poly& p, const Poly& q, const SobolevProductSpec& spec);

/// Reference-interval product of monic polynomials on [-1,1] with eta_tilde.
double inner_product_unshifted(const Poly& p, const Poly& q, const SobolevProductSpec& spec);

double measure_mass(const SobolevProductSpec& spec);

/// Residual polynomial of degree <= t minimizing the Sobolev norm, together
/// with the averaging weights a_i = 1/||S_i||^2 and A_t = sum a_i;
/// ||p_star||^2 = 1/A_t.
struct OptimalResidual {
  Poly p_star;
  std::vector<double> a;
  double big_a = 0.0;
};

OptimalResidual optimal_residual(const SobolevProductSpec& spec, int t);

/// Worst-case Jacobian suboptimality bound of gradient descent with step h:
/// max over [ell, big_l] of |(1-h l)^{t-1} ((1+(t-1) h l) d0 + h t g)|.
double gd_bound(double h, double ell, double big_l, double d0, double g, int t);

/// Chebyshev-method bound 2 xi^t/(1+xi^{2t}) (|2t^2/(1-k)-1| d0 + 2t^2/(L-l) g).
double chebyshev_bound(double ell, double big_l, double d0, double g, int t);

/// First-order-method lower bound 2 xi^t/(1+xi^{2t}) d0.
double lower_bound(double ell, double big_l, double d0, int t);

/// max|P - l P'| d0 + max|P'| g over [ell, big_l], grid maximum.
double jacobian_bound_of_poly(const Poly& p, double ell, double big_l, double d0, double g);

/// Same bound for the schedule's residual polynomials at every t <= horizon,
/// evaluated by pointwise recurrence (valid beyond kMaxPolyDegree).
std::vector<double> bound_curve_of_schedule(const MethodSchedule& schedule, int horizon,
                                            double ell, double big_l, double d0, double g,
                                            int grid_points = 10001);

/// Largest step size for which the gradient-descent bound (g = 0) is
/// monotonically decreasing from t = 1: sqrt(2)/L.
double monotone_step_threshold(double big_l);

struct BurnInStats {
  int peak_index = 0;
  double peak_value = 0.0;
  int burn_in_length = 0;
};

/// Peak location/value and burn-in length (first index after the peak where
/// the curve drops below its initial value) of a suboptimality curve.
BurnInStats burn_in_stats(const std::vector<double>& curve);

/// Average-case factor 2 ||p||^2_eta multiplying E||J_0 - J_star||^2.
double average_case_bound(const SobolevProductSpec& spec, const Poly& p);

}  // namespace unrolldiff
