#include "verify_suites.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

#include "unrolldiff/polynomials.hpp"
#include "unrolldiff/problems.hpp"
#include "unrolldiff/unroll.hpp"

namespace unrolldiff::verify {

namespace {

bool report(const char* name, double measured, double tol) {
  const bool ok = measured <= tol;
  std::printf("[%s] %-58s measured=%.3e tol=%.0e\n", ok ? "PASS" : "FAIL", name, measured, tol);
  return ok;
}

struct TightRidge {
  QuadraticFamily family;
  Eigen::VectorXd theta;
};

TightRidge tight_synthetic(int n, int d, std::uint64_t seed, bool with_center) {
  RidgeInstance ridge = make_synthetic_ridge(n, d, seed);
  if (with_center) {
    GaussianStream gs(seed + 5000);
    ridge.center.resize(d);
    for (int i = 0; i < d; ++i) ridge.center[i] = gs.next();
  }
  const double theta0 = default_ridge_theta(ridge.design);
  QuadraticFamily fam = make_ridge(ridge, {theta0, theta0});
  Eigen::VectorXd tv = Eigen::VectorXd::Constant(1, theta0);
  return {with_tight_bounds(fam, tv), tv};
}

std::vector<std::pair<std::string, MethodSchedule>> standard_methods(double ell, double big_l) {
  return {
      {"gd_small", gd_schedule(1.0 / big_l)},
      {"gd_large", gd_schedule(2.0 / (big_l + ell))},
      {"chebyshev", chebyshev_schedule(ell, big_l)},
      {"heavy_ball", heavy_ball_schedule(ell, big_l)},
      {"sobolev", sobolev_schedule({1.0, 1.0, ell, big_l})},
      {"sobolev_asymptotic", sobolev_asymptotic_schedule(ell, big_l)},
  };
}

bool suite_identities() {
  bool ok = true;
  auto [fam, tv] = tight_synthetic(20, 10, 11, false);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(10);
  const Eigen::MatrixXd j0 = Eigen::MatrixXd::Zero(10, 1);
  for (const auto& [name, sched] : standard_methods(fam.ell, fam.big_l)) {
    double worst = 0.0;
    for (int t = 0; t <= 30; ++t) {
      worst = std::max(worst, master_identity_residual(fam, tv, sched, t, x0, j0));
    }
    ok &= report(("master identity residual, " + name + ", t<=30").c_str(), worst, 1e-9);
  }
  double worst_norm = 0.0;
  for (const auto& [name, sched] : standard_methods(0.5, 10.0)) {
    SchedulePointwise pw(sched, 0.0);
    for (int t = 0; t <= 60; ++t) {
      worst_norm = std::max(worst_norm, std::abs(pw.value() - 1.0));
      pw.advance();
    }
  }
  ok &= report("residual polynomial normalization P_t(0)=1, t<=60", worst_norm, 1e-10);
  return ok;
}

bool suite_orthogonality() {
  bool ok = true;
  for (double alpha : {0.5, 1.0, 2.0}) {
    auto spec = SobolevProductSpec::make(alpha, 0.0, 0.5, 10.0, 16);
    double worst_g = 0.0;
    for (int i = 0; i <= 15; ++i) {
      const Poly gi = gegenbauer_monic(alpha, i);
      const double ni = inner_product_unshifted(gi, gi, spec);
      for (int j = 0; j < i; ++j) {
        const Poly gj = gegenbauer_monic(alpha, j);
        const double nj = inner_product_unshifted(gj, gj, spec);
        worst_g = std::max(worst_g,
                           std::abs(inner_product_unshifted(gi, gj, spec)) / std::sqrt(ni * nj));
      }
    }
    char label[96];
    std::snprintf(label, sizeof(label), "gegenbauer orthogonality, alpha=%.1f, i,j<=15", alpha);
    ok &= report(label, worst_g, 1e-10);

    for (double eta_tilde : {0.1, 1.0, 10.0}) {
      SobolevProductSpec sob = spec;
      sob.eta_tilde = eta_tilde;
      SobolevSequences seq(alpha, eta_tilde);
      double worst_s = 0.0, worst_d = 0.0;
      for (int i = 0; i <= 15; ++i) {
        const Poly si = sobolev_monic(alpha, eta_tilde, i);
        const double ni = inner_product_unshifted(si, si, sob);
        for (int j = 0; j < i; ++j) {
          const Poly sj = sobolev_monic(alpha, eta_tilde, j);
          const double nj = inner_product_unshifted(sj, sj, sob);
          worst_s = std::max(
              worst_s, std::abs(inner_product_unshifted(si, sj, sob)) / std::sqrt(ni * nj));
        }
        if (i >= 1) {
          const Poly gi = gegenbauer_monic(alpha, i);
          const double gn = inner_product_unshifted(gi, gi, spec);
          worst_d = std::max(worst_d, std::abs(seq.d(i) * ni / (seq.xi(i) * gn) - 1.0));
        }
      }
      char lbl[96];
      std::snprintf(lbl, sizeof(lbl), "sobolev orthogonality, alpha=%.1f eta~=%.1f", alpha,
                    eta_tilde);
      ok &= report(lbl, worst_s, 1e-10);
      std::snprintf(lbl, sizeof(lbl), "d_t = xi_t ||G_t||^2/||S_t||^2, alpha=%.1f eta~=%.1f",
                    alpha, eta_tilde);
      ok &= report(lbl, worst_d, 1e-8);
    }

    SobolevSequences seq(alpha, 0.0);
    double worst_k = 0.0;
    double prev = inner_product_unshifted(Poly{{1.0}}, Poly{{1.0}}, spec);
    for (int t = 1; t <= 15; ++t) {
      const Poly g = gegenbauer_monic(alpha, t);
      const double cur = inner_product_unshifted(g, g, spec);
      worst_k = std::max(worst_k, std::abs(cur / (prev * seq.big_k(t)) - 1.0));
      prev = cur;
    }
    char lbl[96];
    std::snprintf(lbl, sizeof(lbl), "norm recurrence ||G_t||^2=K_t||G_{t-1}||^2, alpha=%.1f",
                  alpha);
    ok &= report(lbl, worst_k, 1e-10);
  }
  return ok;
}

bool suite_oracles() {
  bool ok = true;
  auto [fam, tv] = tight_synthetic(60, 30, 7, false);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(30);
  const Eigen::MatrixXd j0 = Eigen::MatrixXd::Zero(30, 1);
  for (const auto& [name, sched] : standard_methods(fam.ell, fam.big_l)) {
    double worst = 0.0;
    for (int horizon : {1, 7, 30, 50}) {
      const Trajectory traj = run(fam, tv, sched, x0, j0, horizon);
      const Eigen::MatrixXd fd = finite_difference_jacobian(fam, tv, sched, x0, horizon);
      worst = std::max(worst, (fd - traj.entries.back().jac).norm() /
                                  std::max(1e-12, traj.entries.back().jac.norm()));
    }
    ok &= report(("finite differences vs forward mode, " + name).c_str(), worst, 1e-5);
  }

  {
    const double ell = 0.5, big_l = 10.0;
    auto spec = SobolevProductSpec::make(1.0, 1.0, ell, big_l, 16);
    MethodSchedule sched = sobolev_schedule({1.0, 1.0, ell, big_l});
    double worst = 0.0;
    for (int t = 0; t <= 12; ++t) {
      const auto opt = optimal_residual(spec, t);
      for (int k = 0; k < 20; ++k) {
        const double lam = ell + (big_l - ell) * k / 19.0;
        worst = std::max(worst,
                         std::abs(schedule_poly_eval(sched, t, lam).first - eval(opt.p_star, lam)));
      }
    }
    ok &= report("streaming schedule vs coefficient-level construction, t<=12", worst, 1e-7);
  }

  {
    const double h = 1e-6 * (1.0 + tv[0]);
    const Eigen::VectorXd plus = solve_exact(fam, Eigen::VectorXd::Constant(1, tv[0] + h));
    const Eigen::VectorXd minus = solve_exact(fam, Eigen::VectorXd::Constant(1, tv[0] - h));
    const Eigen::MatrixXd jac = exact_jacobian(fam, tv);
    ok &= report("implicit jacobian vs finite differences of the solve",
                 ((plus - minus) / (2.0 * h) - jac.col(0)).norm() / jac.norm(), 1e-5);
  }
  return ok;
}

bool suite_bounds_domination() {
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [fam, tv] = tight_synthetic(40, 20, seed, /*with_center=*/(seed % 2) == 1);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(20);
    const Eigen::MatrixXd j0 = Eigen::MatrixXd::Zero(20, 1);
    const double d0 = (j0 - exact_jacobian(fam, tv)).norm();
    const double g = cross_derivative_norm(fam, tv, x0, j0);
    const double h_large = 2.0 / (fam.ell + fam.big_l);

    const SuboptimalityCurves gd =
        suboptimality_curves(run(fam, tv, gd_schedule(h_large), x0, j0, 100), fam, tv);
    const SuboptimalityCurves cheb = suboptimality_curves(
        run(fam, tv, chebyshev_schedule(fam.ell, fam.big_l), x0, j0, 100), fam, tv);
    double excess = 0.0;
    for (int t = 1; t <= 100; ++t) {
      excess = std::max(excess, gd.jacobian_subopt[t] -
                                    gd_bound(h_large, fam.ell, fam.big_l, d0, g, t));
      excess = std::max(excess, cheb.jacobian_subopt[t] -
                                    chebyshev_bound(fam.ell, fam.big_l, d0, g, t));
    }
    char lbl[96];
    std::snprintf(lbl, sizeof(lbl), "empirical <= bound (gd large, chebyshev), seed=%llu",
                  static_cast<unsigned long long>(seed));
    ok &= report(lbl, excess, 1e-8);
  }

  double excess = 0.0;
  for (auto [ell, big_l] : std::vector<std::pair<double, double>>{{0.5, 10.0}, {1.0, 100.0}}) {
    for (int t = 1; t <= 1000; ++t) {
      excess = std::max(excess, lower_bound(ell, big_l, 1.0, t) -
                                    chebyshev_bound(ell, big_l, 1.0, 0.0, t));
    }
  }
  ok &= report("lower bound <= chebyshev bound, t<=1000", excess, 1e-12);
  return ok;
}

}  // namespace

bool run_suite(const std::string& name) {
  if (name == "identities") return suite_identities();
  if (name == "orthogonality") return suite_orthogonality();
  if (name == "oracles") return suite_oracles();
  if (name == "bounds_domination") return suite_bounds_domination();
  throw std::invalid_argument("unknown verify suite: " + name);
}

}  // namespace unrolldiff::verify
