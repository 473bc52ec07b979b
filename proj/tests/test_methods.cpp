#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "test_helpers.hpp"
#include "unrolldiff/polynomials.hpp"
#include "unrolldiff/problems.hpp"
#include "unrolldiff/unroll.hpp"

using namespace unrolldiff;
using testutil::scalar_theta;

TEST_CASE("gradient descent schedule") {
  CHECK_THROWS_AS(gd_schedule(0.0), std::invalid_argument);
  CHECK_THROWS_AS(gd_schedule(-1.0), std::invalid_argument);

  const double ell = 0.5, big_l = 10.0;
  MethodSchedule at_l = gd_schedule(1.0 / big_l);
  for (int t : {1, 3, 8}) {
    CHECK(schedule_poly_eval(at_l, t, big_l).first == doctest::Approx(0.0).epsilon(1e-14));
  }
  MethodSchedule large = gd_schedule(2.0 / (big_l + ell));
  const double r = (big_l - ell) / (big_l + ell);
  for (int t : {1, 4, 12}) {
    CHECK(schedule_poly_eval(large, t, ell).first == doctest::Approx(std::pow(r, t)));
  }
  CHECK(schedule_poly_eval(gd_schedule(0.1), 2, 1.0).first == doctest::Approx(0.81));
}

TEST_CASE("gegenbauer schedule first step and heavy-ball limit") {
  const StepCoeffs c1 = gegenbauer_schedule(1.0, 1.0, 3.0).at(1);
  CHECK(c1.h == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c1.m == doctest::Approx(0.0));

  // alpha = 0, degree 3: matches the shifted-normalized Chebyshev with
  // T_3(x) = 4x^3 - 3x at the three probe points.
  MethodSchedule cheb = gegenbauer_schedule(0.0, 1.0, 3.0);
  const auto t3 = [](double x) { return 4.0 * x * x * x - 3.0 * x; };
  for (double lam : {1.0, 2.0, 3.0}) {
    const double m = (2.0 * lam - 4.0) / 2.0;
    CHECK(schedule_poly_eval(cheb, 3, lam).first ==
          doctest::Approx(t3(m) / t3(-2.0)).epsilon(1e-13));
  }

  MethodSchedule g = gegenbauer_schedule(1.0, 1.0, 4.0);
  const StepCoeffs far = g.at(400);
  CHECK(far.h == doctest::Approx(4.0 / 9.0).epsilon(1e-9));
  CHECK(far.m == doctest::Approx(1.0 / 9.0).epsilon(1e-9));

  CHECK_THROWS_AS(gegenbauer_schedule(-0.5, 1.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS(gegenbauer_schedule(1.0, 3.0, 1.0), std::invalid_argument);
}

TEST_CASE("chebyshev schedule residual values") {
  MethodSchedule cheb = chebyshev_schedule(1.0, 3.0);
  CHECK(schedule_poly_eval(cheb, 1, 0.0).first == doctest::Approx(1.0));
  CHECK(schedule_poly_eval(cheb, 2, 2.0).first == doctest::Approx(-1.0 / 7.0).epsilon(1e-13));

  // max over [ell, L] of |C_t| equals 2/(xi^t + xi^-t).
  const double rk = std::sqrt(1.0 / 3.0);
  const double xi = (1.0 - rk) / (1.0 + rk);
  for (int t : {1, 5, 15, 40}) {
    double mx = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double lam = 1.0 + 2.0 * i / 2000.0;
      mx = std::max(mx, std::abs(schedule_poly_eval(cheb, t, lam).first));
    }
    const double xt = std::pow(xi, t);
    CHECK(mx == doctest::Approx(2.0 * xt / (1.0 + xt * xt)).epsilon(1e-10));
  }
}

TEST_CASE("chebyshev equals the shifted-normalized polynomial at chebyshev nodes") {
  const double ell = 0.5, big_l = 10.0;
  MethodSchedule cheb = chebyshev_schedule(ell, big_l);
  for (int t = 0; t <= 30; ++t) {
    for (int k = 0; k < 20; ++k) {
      const double node = std::cos((k + 0.5) * std::numbers::pi / 20.0);
      const double lam = (big_l + ell) / 2.0 + (big_l - ell) / 2.0 * node;
      CHECK(std::abs(schedule_poly_eval(cheb, t, lam).first -
                     testutil::shifted_chebyshev(t, lam, ell, big_l)) <= 1e-9);
    }
  }
}

TEST_CASE("heavy ball schedule") {
  CHECK_THROWS_AS(heavy_ball_schedule(2.0, 2.0), std::invalid_argument);
  const StepCoeffs c = heavy_ball_schedule(1.0, 4.0).at(7);
  CHECK(c.h == doctest::Approx(4.0 / 9.0));
  CHECK(c.m == doctest::Approx(1.0 / 9.0));

  const double rk = std::sqrt(0.5 / 10.0);
  CHECK(heavy_ball_schedule(0.5, 10.0).at(1).m ==
        doctest::Approx(std::pow((1.0 - rk) / (1.0 + rk), 2)));
}

TEST_CASE("sobolev schedule initialization") {
  MethodSchedule s = sobolev_schedule({1.0, 1.0, 0.5, 10.0});
  const StepCoeffs c1 = s.at(1);
  CHECK(c1.c1 == 0.0);
  CHECK(c1.c2 == 1.0);
  CHECK(c1.c3 == 0.0);

  SobolevSequences seq(1.0, 0.0);
  CHECK(seq.d(1) == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(sobolev_schedule({1.0, -1.0, 0.5, 10.0}), std::invalid_argument);
  CHECK_THROWS_AS(s.at(0), std::invalid_argument);
}

TEST_CASE("sobolev schedule matches the coefficient-level construction") {
  const double ell = 0.5, big_l = 10.0, alpha = 1.0, eta = 1.0;
  MethodSchedule sched = sobolev_schedule({alpha, eta, ell, big_l});
  auto spec = SobolevProductSpec::make(alpha, eta, ell, big_l, 16);
  for (int t = 0; t <= 12; ++t) {
    const auto opt = optimal_residual(spec, t);
    for (int k = 0; k < 20; ++k) {
      const double lam = ell + (big_l - ell) * k / 19.0;
      CHECK(std::abs(schedule_poly_eval(sched, t, lam).first - eval(opt.p_star, lam)) <= 1e-8);
    }
  }
}

TEST_CASE("sobolev asymptotic schedule") {
  // Near-degenerate interval: the method collapses to gradient descent 1/L.
  {
    const double big_l = 5.0, ell = big_l * (1.0 - 1e-10);
    MethodSchedule s = sobolev_asymptotic_schedule(ell, big_l);
    CHECK(s.at(1).h == doctest::Approx(1.0 / big_l).epsilon(1e-9));
    CHECK(s.at(1).m <= 1e-19);

    QuadraticFamily fam = testutil::constant_family(Eigen::MatrixXd::Identity(3, 3) * big_l,
                                                    Eigen::VectorXd::Ones(3), ell, big_l);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(3);
    const auto hb = run_values(fam, scalar_theta(1.0), s, x0, 10);
    const auto gd = run_values(fam, scalar_theta(1.0), gd_schedule(s.at(1).h), x0, 10);
    for (int t = 0; t <= 10; ++t) CHECK((hb[t] - gd[t]).norm() <= 1e-9 * (1.0 + gd[t].norm()));
  }

  MethodSchedule s = sobolev_asymptotic_schedule(1.0, 4.0);
  const StepCoeffs c = s.at(5);
  const double m = 1.0 / 9.0;
  CHECK(c.h == doctest::Approx(4.0 / 9.0));
  CHECK(c.m == doctest::Approx(m));
  CHECK(c.c2 == doctest::Approx(1.0 / (1.0 - m)));
  CHECK(c.c3 == doctest::Approx(m / (1.0 - m)));
  CHECK(1.0 - c.a / c.big_a == doctest::Approx(m).epsilon(1e-12));
}

TEST_CASE("sobolev coefficients converge to the asymptotic schedule") {
  const double ell = 0.5, big_l = 10.0;
  const double h_inf = heavy_ball_step(ell, big_l);
  const double m_inf = heavy_ball_momentum(ell, big_l);
  for (double alpha : {0.5, 1.0, 2.0}) {
    for (double eta : {0.0, 1.0, big_l / ell}) {
      MethodSchedule s = sobolev_schedule({alpha, eta, ell, big_l});
      const StepCoeffs c200 = s.at(200);
      CHECK(std::abs(c200.h - h_inf) + std::abs(c200.m - m_inf) <= 1e-3);
      const StepCoeffs c199 = s.at(199);
      CHECK(std::abs((c200.a / c199.a) * m_inf - 1.0) <= 0.01);
      CHECK(std::abs((c200.big_a / c200.a) * (1.0 - m_inf) - 1.0) <= 0.01);
    }
  }
  // Non-asymptotic coefficients sit within 1e-3 of the asymptotic schedule at t=200.
  MethodSchedule s = sobolev_schedule({1.0, 1.0, ell, big_l});
  MethodSchedule a = sobolev_asymptotic_schedule(ell, big_l);
  CHECK(std::abs(s.at(200).h - a.at(200).h) <= 1e-3);
  CHECK(std::abs(s.at(200).m - a.at(200).m) <= 1e-3);
}

TEST_CASE("residual polynomials are normalized at zero") {
  const double ell = 0.5, big_l = 10.0;
  for (MethodSchedule s :
       {gd_schedule(0.15), chebyshev_schedule(ell, big_l), gegenbauer_schedule(1.5, ell, big_l),
        heavy_ball_schedule(ell, big_l), sobolev_schedule({1.0, 1.0, ell, big_l}),
        sobolev_schedule({0.5, big_l / ell, ell, big_l}), sobolev_asymptotic_schedule(ell, big_l)}) {
    SchedulePointwise pw(s, 0.0);
    for (int t = 0; t <= 60; ++t) {
      CHECK(std::abs(pw.value() - 1.0) <= 1e-10);
      pw.advance();
    }
  }
}

TEST_CASE("averaging weights accumulate") {
  for (MethodSchedule s : {sobolev_schedule({1.0, 1.0, 0.5, 10.0}),
                           sobolev_schedule({2.0, 20.0, 0.5, 10.0}),
                           sobolev_asymptotic_schedule(0.5, 10.0)}) {
    double prev_big_a = 1.0;  // A_0
    for (int t = 1; t <= 60; ++t) {
      const StepCoeffs c = s.at(t);
      CHECK(c.a > 0.0);
      CHECK(c.big_a == doctest::Approx(prev_big_a + c.a).epsilon(1e-12));
      prev_big_a = c.big_a;
    }
  }
}

TEST_CASE("sobolev scalar sequences stay in range") {
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    for (double eta_tilde : {0.0, 0.1, 1.0, 10.0}) {
      SobolevSequences seq(alpha, eta_tilde);
      for (int t = 1; t <= 60; ++t) {
        CHECK(seq.d(t) > 0.0);
        CHECK(seq.big_k(t) > 0.0);
        CHECK(seq.big_k(t) < 1.0);
        CHECK(seq.xi(t) > 0.0);
      }
    }
  }
}

TEST_CASE("sobolev y-sequence at alpha 0 is the chebyshev method") {
  const double ell = 0.5, big_l = 10.0;
  MethodSchedule sob = sobolev_schedule({0.0, 1.0, ell, big_l});
  MethodSchedule cheb = chebyshev_schedule(ell, big_l);
  for (int t = 1; t <= 40; ++t) {
    CHECK(sob.at(t).h == doctest::Approx(cheb.at(t).h).epsilon(1e-14));
    CHECK(sob.at(t).m == doctest::Approx(cheb.at(t).m).epsilon(1e-14));
  }
}

TEST_CASE("memoized schedules are safe for concurrent reads") {
  MethodSchedule sched = sobolev_schedule({1.0, 1.0, 0.5, 10.0});
  std::vector<StepCoeffs> serial;
  for (int t = 1; t <= 200; ++t) serial.push_back(sched.at(t));

  MethodSchedule fresh = sobolev_schedule({1.0, 1.0, 0.5, 10.0});
  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      for (int t = 1 + w; t <= 200; t += 1) {
        const StepCoeffs c = fresh.at(t);
        const StepCoeffs& ref = serial[t - 1];
        if (c.h != ref.h || c.m != ref.m || c.c1 != ref.c1 || c.a != ref.a ||
            c.big_a != ref.big_a) {
          ++mismatches;
        }
      }
    });
  }
  for (auto& th : workers) th.join();
  CHECK(mismatches.load() == 0);
}

TEST_CASE("iterates stay in the krylov span of observed gradients") {
  RidgeInstance ridge = make_synthetic_ridge(12, 6, 99);
  const double theta0 = default_ridge_theta(ridge.design);
  QuadraticFamily fam = make_ridge(ridge, {theta0, theta0});
  const Eigen::VectorXd tv = scalar_theta(theta0);
  const FamilyEval at = eval_family(fam, tv);

  GaussianStream gs(17);
  Eigen::VectorXd x0(6);
  for (int i = 0; i < 6; ++i) x0[i] = gs.next();

  for (MethodSchedule s :
       {gd_schedule(1.0 / fam.big_l), chebyshev_schedule(fam.ell, fam.big_l),
        heavy_ball_schedule(fam.ell, fam.big_l), sobolev_schedule({1.0, 1.0, fam.ell, fam.big_l}),
        sobolev_asymptotic_schedule(fam.ell, fam.big_l)}) {
    const auto path = run_values(fam, tv, s, x0, 5);
    Eigen::MatrixXd krylov(6, 5);
    for (int t = 0; t < 5; ++t) krylov.col(t) = at.hess * path[t] + at.lin;
    for (int t = 1; t <= 5; ++t) {
      const Eigen::VectorXd dx = path[t] - x0;
      const Eigen::VectorXd coef =
          krylov.leftCols(t).colPivHouseholderQr().solve(dx);
      const double resid = (krylov.leftCols(t) * coef - dx).norm();
      CHECK(resid <= 1e-8 * std::max(1.0, dx.norm()));
    }
  }
}
