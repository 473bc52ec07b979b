#include "unrolldiff/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace unrolldiff {

namespace {

void trim(Poly& p) {
  while (!p.coeffs.empty() && p.coeffs.back() == 0.0) p.coeffs.pop_back();
}

Poly axpy(double a, const Poly& x, const Poly& y) {  // a*x + y
  Poly r = y;
  if (r.coeffs.size() < x.coeffs.size()) r.coeffs.resize(x.coeffs.size(), 0.0);
  for (size_t i = 0; i < x.coeffs.size(); ++i) r.coeffs[i] += a * x.coeffs[i];
  return r;
}

Poly shift_up(const Poly& p) {  // multiply by lambda
  Poly r;
  r.coeffs.assign(p.coeffs.size() + 1, 0.0);
  for (size_t i = 0; i < p.coeffs.size(); ++i) r.coeffs[i + 1] = p.coeffs[i];
  return r;
}

Poly scale(const Poly& p, double a) {
  Poly r = p;
  for (double& c : r.coeffs) c *= a;
  return r;
}

const Poly kOne{{1.0}};

}  // namespace

namespace {

// Double-double helpers (Dekker/Knuth): Horner evaluation in roughly twice
// the working precision, which keeps high-degree monomial coefficient
// vectors usable across the whole evaluation interval.
struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD dd_add(const DD& a, const DD& b) {
  DD s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  const DD r = two_sum(s.hi, s.lo);
  return r;
}

inline DD dd_mul_d(const DD& a, double b) {
  const double ph = a.hi * b;
  const double pl = std::fma(a.hi, b, -ph) + a.lo * b;
  return two_sum(ph, pl);
}

}  // namespace

double eval(const Poly& p, double lambda) {
  DD v;
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    v = dd_add(dd_mul_d(v, lambda), DD{*it, 0.0});
  }
  return v.hi + v.lo;
}

std::pair<double, double> eval_with_derivative(const Poly& p, double lambda) {
  DD v, dv;
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    dv = dd_add(dd_mul_d(dv, lambda), v);
    v = dd_add(dd_mul_d(v, lambda), DD{*it, 0.0});
  }
  return {v.hi + v.lo, dv.hi + dv.lo};
}

Poly derivative(const Poly& p) {
  Poly r;
  if (p.coeffs.size() <= 1) return r;
  r.coeffs.resize(p.coeffs.size() - 1);
  for (size_t i = 1; i < p.coeffs.size(); ++i) r.coeffs[i - 1] = i * p.coeffs[i];
  return r;
}

Poly residual_poly_of_schedule(const MethodSchedule& schedule, int t) {
  if (t < 0) throw std::invalid_argument("residual polynomial requires t >= 0");
  if (t > kMaxPolyDegree) {
    throw std::invalid_argument(
        "coefficient representation is capped at degree " + std::to_string(kMaxPolyDegree) +
        "; use pointwise evaluation for larger t");
  }
  if (schedule.kind() == ScheduleKind::TwoSequence) {
    Poly cur = kOne, prev = kOne;
    for (int s = 1; s <= t; ++s) {
      const StepCoeffs c = schedule.at(s);
      // P_s = (1+m) P_{s-1} - h lambda P_{s-1} - m P_{s-2}
      Poly next = axpy(1.0 + c.m, cur, scale(prev, -c.m));
      next = axpy(-c.h, shift_up(cur), next);
      prev = std::move(cur);
      cur = std::move(next);
    }
    trim(cur);
    return cur;
  }
  Poly g = kOne, g_prev = kOne, z = kOne, z_prev = kOne, x = kOne;
  for (int s = 1; s <= t; ++s) {
    const StepCoeffs c = schedule.at(s);
    Poly g_next = axpy(1.0 + c.m, g, scale(g_prev, -c.m));
    g_next = axpy(-c.h, shift_up(g), g_next);
    Poly z_next = axpy(c.c1, z_prev, axpy(c.c2, g_next, scale(g_prev, -c.c3)));
    const double w = c.a / c.big_a;
    Poly x_next = axpy(1.0 - w, x, scale(z_next, w));
    g_prev = std::move(g);
    g = std::move(g_next);
    z_prev = std::move(z);
    z = std::move(z_next);
    x = std::move(x_next);
  }
  trim(x);
  return x;
}

SchedulePointwise::SchedulePointwise(MethodSchedule schedule, double lambda)
    : schedule_(std::move(schedule)),
      lambda_(lambda),
      three_(schedule_.kind() == ScheduleKind::ThreeSequence) {}

void SchedulePointwise::advance() {
  const StepCoeffs c = schedule_.at(t_ + 1);
  if (!three_) {
    const double p_new = x_ + c.m * (x_ - g_prev_) - c.h * lambda_ * x_;
    const double d_new = xd_ + c.m * (xd_ - gd_prev_) - c.h * (x_ + lambda_ * xd_);
    g_prev_ = x_;
    gd_prev_ = xd_;
    x_ = p_new;
    xd_ = d_new;
  } else {
    const double g_new = g_ + c.m * (g_ - g_prev_) - c.h * lambda_ * g_;
    const double gd_new = gd_ + c.m * (gd_ - gd_prev_) - c.h * (g_ + lambda_ * gd_);
    const double z_new = c.c1 * z_prev_ + c.c2 * g_new - c.c3 * g_prev_;
    const double zd_new = c.c1 * zd_prev_ + c.c2 * gd_new - c.c3 * gd_prev_;
    const double w = c.a / c.big_a;
    const double x_new = (1.0 - w) * x_ + w * z_new;
    const double xd_new = (1.0 - w) * xd_ + w * zd_new;
    g_prev_ = g_;
    gd_prev_ = gd_;
    g_ = g_new;
    gd_ = gd_new;
    z_prev_ = z_;
    zd_prev_ = zd_;
    z_ = z_new;
    zd_ = zd_new;
    x_ = x_new;
    xd_ = xd_new;
  }
  ++t_;
}

std::pair<double, double> schedule_poly_eval(const MethodSchedule& schedule, int t, double lambda) {
  SchedulePointwise pw(schedule, lambda);
  for (int s = 0; s < t; ++s) pw.advance();
  return {pw.value(), pw.deriv()};
}

Poly gegenbauer_monic(double alpha, int t) {
  if (alpha <= -0.5) throw std::invalid_argument("gegenbauer_monic requires alpha > -1/2");
  if (t < 0) throw std::invalid_argument("gegenbauer_monic requires t >= 0");
  Poly prev = kOne;
  if (t == 0) return prev;
  Poly cur{{0.0, 1.0}};
  SobolevSequences seq(alpha, 0.0);
  for (int s = 1; s < t; ++s) {
    Poly next = axpy(-seq.gamma(s), prev, shift_up(cur));
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

Poly sobolev_monic(double alpha, double eta_tilde, int t) {
  if (t < 0) throw std::invalid_argument("sobolev_monic requires t >= 0");
  // S_0 = G_0, S_1 = G_1, and S_2 = G_2 exactly (the d_0 = xi_0 terms cancel).
  if (t <= 2) return gegenbauer_monic(alpha, t);
  SobolevSequences seq(alpha, eta_tilde);
  std::vector<Poly> s(t + 1);
  s[0] = kOne;
  s[1] = Poly{{0.0, 1.0}};
  s[2] = gegenbauer_monic(alpha, 2);
  for (int i = 3; i <= t; ++i) {
    Poly g_i = gegenbauer_monic(alpha, i);
    Poly g_lag = gegenbauer_monic(alpha, i - 2);
    s[i] = axpy(seq.d(i - 2), s[i - 2], axpy(-seq.xi(i - 2), g_lag, std::move(g_i)));
  }
  return s[t];
}

Poly shift_normalize(const Poly& p, double ell, double big_l) {
  if (!(ell > 0.0 && ell < big_l)) {
    throw std::invalid_argument("shift_normalize requires 0 < ell < big_l");
  }
  const double sigma1 = 2.0 / (big_l - ell);
  const double sigma0 = -(big_l + ell) / (big_l - ell);
  const double at_zero = eval(p, sigma0);
  if (std::abs(at_zero) < 1e-14) {
    throw std::invalid_argument("shift_normalize: polynomial vanishes at m(0)");
  }
  // Horner in coefficient space: q = p(sigma1*lambda + sigma0) / p(sigma0).
  Poly q;
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    Poly next = axpy(sigma1, shift_up(q), scale(q, sigma0));
    if (next.coeffs.empty()) next.coeffs.push_back(0.0);
    next.coeffs[0] += *it;
    q = std::move(next);
  }
  q = scale(q, 1.0 / at_zero);
  trim(q);
  return q;
}

double gegenbauer_moment(double alpha, int k) {
  if (k % 2 == 1) return 0.0;
  // m_0 = sqrt(pi) Gamma(alpha+1/2) / Gamma(alpha+1); m_{2j} = m_{2j-2} (j-1/2)/(j+alpha).
  double m = std::sqrt(std::numbers::pi) * std::tgamma(alpha + 0.5) / std::tgamma(alpha + 1.0);
  for (int j = 1; 2 * j <= k; ++j) m *= (j - 0.5) / (j + alpha);
  return m;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_gegenbauer(double alpha, int n) {
  if (n < 1) throw std::invalid_argument("gauss_gegenbauer requires n >= 1");
  if (alpha <= -0.5) throw std::invalid_argument("gauss_gegenbauer requires alpha > -1/2");
  SobolevSequences seq(alpha, 0.0);
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double off = std::sqrt(seq.gamma(i));
    jacobi(i, i - 1) = off;
    jacobi(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success) throw std::runtime_error("gauss_gegenbauer: eigensolver failed");
  const double mass = gegenbauer_moment(alpha, 0);
  Eigen::VectorXd nodes = es.eigenvalues();
  Eigen::VectorXd weights(n);
  for (int i = 0; i < n; ++i) {
    const double first = es.eigenvectors()(0, i);
    weights[i] = mass * first * first;
  }
  return {std::move(nodes), std::move(weights)};
}

SobolevProductSpec SobolevProductSpec::make(double alpha, double eta, double ell, double big_l,
                                            int max_degree) {
  if (!(ell > 0.0 && ell < big_l)) {
    throw std::invalid_argument("SobolevProductSpec requires 0 < ell < big_l");
  }
  if (eta < 0.0) throw std::invalid_argument("SobolevProductSpec requires eta >= 0");
  SobolevProductSpec spec;
  spec.alpha = alpha;
  spec.eta = eta;
  spec.ell = ell;
  spec.big_l = big_l;
  const double sigma1 = 2.0 / (big_l - ell);
  spec.eta_tilde = sigma1 * sigma1 * eta;
  std::tie(spec.nodes, spec.weights) = gauss_gegenbauer(alpha, max_degree + 4);
  return spec;
}

namespace {

void check_order(const SobolevProductSpec& spec, int integrand_degree) {
  if (integrand_degree > 2 * static_cast<int>(spec.nodes.size()) - 1) {
    throw std::invalid_argument("insufficient quadrature order for requested product");
  }
}

}  // namespace

double measure_mass(const SobolevProductSpec& spec) { return spec.weights.sum(); }

double inner_product(const Poly& p, const Poly& q, const SobolevProductSpec& spec) {
  check_order(spec, std::max(p.degree(), 0) + std::max(q.degree(), 0));
  const double half_width = (spec.big_l - spec.ell) / 2.0;
  const double mid = (spec.big_l + spec.ell) / 2.0;
  double acc = 0.0;
  for (int i = 0; i < spec.nodes.size(); ++i) {
    const double lambda = mid + half_width * spec.nodes[i];
    const auto [pv, pd] = eval_with_derivative(p, lambda);
    const auto [qv, qd] = eval_with_derivative(q, lambda);
    acc += spec.weights[i] * (pv * qv + spec.eta * pd * qd);
  }
  return acc;
}

double inner_product_unshifted(const Poly& p, const Poly& q, const SobolevProductSpec& spec) {
  check_order(spec, std::max(p.degree(), 0) + std::max(q.degree(), 0));
  double acc = 0.0;
  for (int i = 0; i < spec.nodes.size(); ++i) {
    const double x = spec.nodes[i];
    const auto [pv, pd] = eval_with_derivative(p, x);
    const auto [qv, qd] = eval_with_derivative(q, x);
    acc += spec.weights[i] * (pv * qv + spec.eta_tilde * pd * qd);
  }
  return acc;
}

OptimalResidual optimal_residual(const SobolevProductSpec& spec, int t) {
  if (t < 0) throw std::invalid_argument("optimal_residual requires t >= 0");
  OptimalResidual out;
  out.a.reserve(t + 1);
  Poly acc;
  for (int i = 0; i <= t; ++i) {
    const Poly s_i = shift_normalize(sobolev_monic(spec.alpha, spec.eta_tilde, i),
                                     spec.ell, spec.big_l);
    const double a_i = 1.0 / inner_product(s_i, s_i, spec);
    out.a.push_back(a_i);
    out.big_a += a_i;
    acc = axpy(a_i, s_i, acc);
  }
  out.p_star = scale(acc, 1.0 / out.big_a);
  return out;
}

double gd_bound(double h, double ell, double big_l, double d0, double g, int t) {
  if (t < 1) throw std::invalid_argument("gd_bound requires t >= 1");
  if (h <= 0.0) throw std::invalid_argument("gd_bound requires h > 0");
  const auto value_at = [&](double lambda) {
    const double hl = h * lambda;
    return std::abs(std::pow(1.0 - hl, t - 1) * ((1.0 + (t - 1) * hl) * d0 + h * t * g));
  };
  constexpr int kGrid = 10001;
  double best = std::max(value_at(ell), value_at(big_l));
  for (int i = 0; i < kGrid; ++i) {
    best = std::max(best, value_at(ell + (big_l - ell) * i / (kGrid - 1.0)));
  }
  // Stationary point of the lambda-expression; |.| vanishes there but it is
  // included for completeness with the grid rule.
  const double lam0 = 1.0 / h;
  if (lam0 > ell && lam0 < big_l) best = std::max(best, value_at(lam0));
  return best;
}

namespace {

double chebyshev_rate_prefactor(double ell, double big_l, int t) {
  const double rk = std::sqrt(ell / big_l);
  const double xi = (1.0 - rk) / (1.0 + rk);
  const double xt = std::pow(xi, t);
  return 2.0 * xt / (1.0 + xt * xt);
}

}  // namespace

double chebyshev_bound(double ell, double big_l, double d0, double g, int t) {
  if (t < 0) throw std::invalid_argument("chebyshev_bound requires t >= 0");
  const double kappa = ell / big_l;
  const double t2 = 2.0 * static_cast<double>(t) * t;
  const double bracket = std::abs(t2 / (1.0 - kappa) - 1.0) * d0 + t2 / (big_l - ell) * g;
  return chebyshev_rate_prefactor(ell, big_l, t) * bracket;
}

double lower_bound(double ell, double big_l, double d0, int t) {
  if (t < 0) throw std::invalid_argument("lower_bound requires t >= 0");
  return chebyshev_rate_prefactor(ell, big_l, t) * d0;
}

double jacobian_bound_of_poly(const Poly& p, double ell, double big_l, double d0, double g) {
  constexpr int kGrid = 10001;
  double max_q = 0.0, max_d = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double lambda = ell + (big_l - ell) * i / (kGrid - 1.0);
    const auto [pv, pd] = eval_with_derivative(p, lambda);
    max_q = std::max(max_q, std::abs(pv - lambda * pd));
    max_d = std::max(max_d, std::abs(pd));
  }
  return max_q * d0 + max_d * g;
}

std::vector<double> bound_curve_of_schedule(const MethodSchedule& schedule, int horizon,
                                            double ell, double big_l, double d0, double g,
                                            int grid_points) {
  if (horizon < 0) throw std::invalid_argument("bound_curve_of_schedule requires horizon >= 0");
  if (grid_points < 2) throw std::invalid_argument("bound_curve_of_schedule requires a grid");
  std::vector<double> max_q(horizon + 1, 0.0), max_d(horizon + 1, 0.0);
  for (int i = 0; i < grid_points; ++i) {
    const double lambda = ell + (big_l - ell) * i / (grid_points - 1.0);
    SchedulePointwise pw(schedule, lambda);
    for (int t = 0; t <= horizon; ++t) {
      if (t > 0) pw.advance();
      max_q[t] = std::max(max_q[t], std::abs(pw.value() - lambda * pw.deriv()));
      max_d[t] = std::max(max_d[t], std::abs(pw.deriv()));
    }
  }
  std::vector<double> bound(horizon + 1);
  for (int t = 0; t <= horizon; ++t) bound[t] = max_q[t] * d0 + max_d[t] * g;
  return bound;
}

double monotone_step_threshold(double big_l) {
  if (big_l <= 0.0) throw std::invalid_argument("monotone_step_threshold requires big_l > 0");
  return std::sqrt(2.0) / big_l;
}

BurnInStats burn_in_stats(const std::vector<double>& curve) {
  if (curve.empty()) throw std::invalid_argument("burn_in_stats requires a non-empty curve");
  BurnInStats stats;
  stats.peak_value = curve[0];
  for (int i = 1; i < static_cast<int>(curve.size()); ++i) {
    if (curve[i] > stats.peak_value) {
      stats.peak_index = i;
      stats.peak_value = curve[i];
    }
  }
  if (stats.peak_index == 0) {
    stats.burn_in_length = 0;
    return stats;
  }
  stats.burn_in_length = static_cast<int>(curve.size());
  for (int i = stats.peak_index + 1; i < static_cast<int>(curve.size()); ++i) {
    if (curve[i] < curve[0]) {
      stats.burn_in_length = i;
      break;
    }
  }
  return stats;
}

double average_case_bound(const SobolevProductSpec& spec, const Poly& p) {
  return 2.0 * inner_product(p, p, spec);
}

}  // namespace unrolldiff
