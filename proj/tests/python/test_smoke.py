"""Smoke tests for the python bindings."""

import math
import sys

import unrolldiff as ud


def approx(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    failures = []

    def check(ok, name):
        print(("PASS " if ok else "FAIL ") + name)
        if not ok:
            failures.append(name)

    # Scalar toy: x_star = -1/theta, J_star = 1/theta^2.
    toy = ud.make_scalar_toy()
    check(approx(ud.solve_exact(toy, 1.0)[0], -1.0), "scalar toy solve")
    check(approx(ud.exact_jacobian(toy, 1.0)[0, 0], 1.0), "scalar toy jacobian")

    # Two gradient-descent steps reproduce the hand-computed values.
    traj = ud.run_zero_init(toy, 1.0, ud.gd_schedule(1.0), 2)
    check(approx(traj.iterate(1)[0], -1.0), "gd step 1 iterate")
    check(approx(traj.jacobian(1)[0, 0], 0.0), "gd step 1 jacobian")
    check(approx(traj.jacobian(2)[0, 0], 1.0), "gd step 2 jacobian")

    # Heavy-ball constants.
    check(approx(ud.heavy_ball_step(1.0, 4.0), 4.0 / 9.0), "heavy-ball step")
    check(approx(ud.heavy_ball_momentum(1.0, 4.0), 1.0 / 9.0), "heavy-ball momentum")

    # Synthetic ridge round trip with the finite-difference oracle.
    fam = ud.make_synthetic(30, 10, 5)
    check(fam.ell > 0.0, "synthetic family has positive ell")
    lo, hi = ud.spectrum_bounds(fam, 1e-2)
    check(lo > 0.0 and hi > lo, "spectrum bounds ordered")
    check(ud.commutativity_defect(fam, 1e-2) < 1e-12, "ridge commutes")

    sched = ud.chebyshev_schedule(fam.ell, fam.big_l)
    theta = 1e-2
    traj = ud.run_zero_init(fam, theta, sched, 20)
    fd = ud.finite_difference_jacobian(fam, theta, sched, [0.0] * 10, 20)
    num = 0.0
    den = 0.0
    for i in range(10):
        num += (fd[i, 0] - traj.jacobian(20)[i, 0]) ** 2
        den += traj.jacobian(20)[i, 0] ** 2
    check(math.sqrt(num) <= 1e-5 * math.sqrt(den), "fd agrees with forward mode")

    # Master identity on a commuting family.
    resid = ud.master_identity_residual(fam, theta, sched, 10, [0.0] * 10, [[0.0]] * 10)
    check(resid <= 1e-9, "master identity residual")

    # Residual polynomial normalization and bounds.
    p = ud.residual_poly_of_schedule(sched, 5)
    check(approx(ud.poly_eval(p, 0.0), 1.0), "residual polynomial P(0)=1")
    check(ud.lower_bound(0.5, 10.0, 1.0, 50) <= ud.chebyshev_bound(0.5, 10.0, 1.0, 0.0, 50),
          "lower bound below chebyshev bound")

    # Sobolev optimal polynomial norm identity.
    spec = ud.SobolevProductSpec.make(1.0, 1.0, 0.5, 10.0, 12)
    opt = ud.optimal_residual(spec, 6)
    check(approx(ud.inner_product(opt.p_star, opt.p_star, spec) * opt.A, 1.0, 1e-8),
          "sobolev optimal norm identity")

    stats = ud.burn_in_stats([1.0, 2.0, 3.0, 2.0, 0.5])
    check(stats.peak_index == 2 and stats.burn_in_length == 4, "burn-in stats")

    # Three-sequence schedule: first combination row and heavy-ball limit.
    sob = ud.sobolev_schedule(1.0, 1.0, 0.5, 10.0)
    c1 = sob.at(1)
    check(c1.c1 == 0.0 and c1.c2 == 1.0 and c1.c3 == 0.0, "sobolev first row")
    c200 = sob.at(200)
    check(abs(c200.h - ud.heavy_ball_step(0.5, 10.0)) < 1e-3, "sobolev step limit")
    flat = ud.sobolev_schedule(1.0, 20.0, 0.5, 10.0)  # eta = L/ell keeps the bump below 2
    curve = ud.bound_curve_of_schedule(flat, 30, 0.5, 10.0, 1.0, 0.0, grid_points=501)
    check(max(curve) <= 2.0 and abs(curve[0] - 1.0) < 1e-12, "sobolev bound curve bounded")

    if failures:
        print(f"{len(failures)} smoke checks failed")
        return 1
    print("all python smoke checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
