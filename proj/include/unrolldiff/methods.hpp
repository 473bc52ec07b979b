#pragma once

#include <memory>

namespace unrolldiff {

enum class ScheduleKind { TwoSequence, ThreeSequence };

/// Per-iteration coefficients of a first-order method.
///
/// Two-sequence methods (gradient descent, Chebyshev, heavy ball) use only
/// (h, m):
///     x_t = x_{t-1} - h_t grad f(x_{t-1}) + m_t (x_{t-1} - x_{t-2}).
/// Three-sequence methods additionally combine an auxiliary z-sequence,
///     z_t = c1_t z_{t-2} + c2_t y_t - c3_t y_{t-2},
/// and average into the main sequence with weights (a_t, A_t):
///     x_t = (A_{t-1}/A_t) x_{t-1} + (a_t/A_t) z_t,  A_t = A_{t-1} + a_t.
struct StepCoeffs {
  double h = 0.0;
  double m = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double a = 0.0;
  double big_a = 0.0;
};

namespace detail {
class ScheduleImpl;
}

/// Immutable per-iteration coefficient schedule.  Coefficient tables are
/// memoized lazily under an internal lock, so a schedule may be shared
/// across threads.
class MethodSchedule {
 public:
  explicit MethodSchedule(std::shared_ptr<const detail::ScheduleImpl> impl);

  ScheduleKind kind() const;

  /// Coefficients applied when advancing from iterate t-1 to t.  Requires t >= 1.
  StepCoeffs at(int t) const;

 private:
  std::shared_ptr<const detail::ScheduleImpl> impl_;
};

/// Fixed-step gradient descent; residual polynomial (1 - h*lambda)^t.
MethodSchedule gd_schedule(double h);

/// Momentum schedule whose residual polynomials are the shifted, residual-
/// normalized monic Gegenbauer family for the weight (1-x^2)^(alpha-1/2)
/// mapped onto [ell, big_l].  alpha = 0 yields the Chebyshev method.
MethodSchedule gegenbauer_schedule(double alpha, double ell, double big_l);

/// Chebyshev semi-iterative method: gegenbauer_schedule at the alpha -> 0 limit.
MethodSchedule chebyshev_schedule(double ell, double big_l);

/// Polyak heavy ball with the asymptotically optimal constants
/// h = (2/(sqrt(ell)+sqrt(big_l)))^2, m = ((1-sqrt(k))/(1+sqrt(k)))^2, k = ell/big_l.
MethodSchedule heavy_ball_schedule(double ell, double big_l);

double heavy_ball_step(double ell, double big_l);
double heavy_ball_momentum(double ell, double big_l);

/// Parameters of the Sobolev-optimal three-sequence method.  eta is expressed
/// on the [ell, big_l] scale; the internal recurrences convert to the
/// reference-interval value eta_tilde = sigma1^2 * eta with sigma1 = 2/(big_l-ell).
struct SobolevParams {
  double alpha = 1.0;
  double eta = 1.0;
  double ell = 0.0;
  double big_l = 0.0;
};

/// Streaming three-sequence method minimizing the Sobolev norm of the
/// residual polynomial at every iteration.
MethodSchedule sobolev_schedule(const SobolevParams& params);

/// Asymptotic limit of sobolev_schedule: a weighted average of heavy-ball
/// iterates, x_t = y_t + m (x_{t-1} - y_{t-2}).  Depends only on ell, big_l.
MethodSchedule sobolev_asymptotic_schedule(double ell, double big_l);

/// Scalar sequences of the monic Gegenbauer/Sobolev construction on the
/// reference interval [-1, 1], for the weight (1-x^2)^(alpha-1/2) and
/// derivative penalty eta_tilde.  Used by the streaming schedule and by the
/// coefficient-level polynomial construction; memoized and thread-safe.
class SobolevSequences {
 public:
  SobolevSequences(double alpha, double eta_tilde);
  ~SobolevSequences();
  SobolevSequences(const SobolevSequences&) = delete;
  SobolevSequences& operator=(const SobolevSequences&) = delete;

  /// Three-term recurrence coefficient of the monic Gegenbauer family,
  /// G_{t+1} = x G_t - gamma_t G_{t-1}.  gamma_1 is the analytic limit
  /// 1/(2(1+alpha)), which removes the 0/0 at alpha = 0.  Requires t >= 1.
  double gamma(int t) const;

  /// xi_t = (t+2)(t+1) / (4(t+alpha+1)(t+alpha)).  Requires t >= 0; note
  /// xi(0) diverges as alpha -> 0 and is never needed by the schedules.
  double xi(int t) const;

  /// Sobolev coupling coefficient d_t; d_0 = xi_0, d_1 and d_2 are explicit,
  /// and t >= 3 follows the rational recurrence in eta_tilde.
  double d(int t) const;

  /// Squared-norm ratio ||G_t||^2 / ||G_{t-1}||^2 of the monic Gegenbauer
  /// family.  Coincides with gamma(t), as it does for every monic orthogonal
  /// family.
  double big_k(int t) const;

  double alpha() const;
  double eta_tilde() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace unrolldiff
