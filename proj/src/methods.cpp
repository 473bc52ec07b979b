#include "unrolldiff/methods.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace unrolldiff {

namespace detail {

class ScheduleImpl {
 public:
  virtual ~ScheduleImpl() = default;
  virtual ScheduleKind kind() const = 0;
  virtual StepCoeffs at(int t) const = 0;
};

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_interval(double ell, double big_l) {
  require(ell > 0.0 && ell < big_l, "spectrum interval requires 0 < ell < big_l");
}

// Denominators of the rational recurrences must stay away from zero.
double guarded_inverse(double den, int t, const char* what) {
  if (std::abs(den) < 1e-14) {
    throw std::runtime_error(std::string("schedule recurrence breakdown in ") + what +
                             " at t=" + std::to_string(t));
  }
  return 1.0 / den;
}

class ConstantTwoSeq final : public ScheduleImpl {
 public:
  ConstantTwoSeq(double h, double m) : h_(h), m_(m) {}
  ScheduleKind kind() const override { return ScheduleKind::TwoSequence; }
  StepCoeffs at(int) const override {
    StepCoeffs c;
    c.h = h_;
    c.m = m_;
    return c;
  }

 private:
  double h_, m_;
};

// delta_t = G_{t-1}(m(0)) / G_t(m(0)) for the monic Gegenbauer family, with
// m(0) = sigma0.  Drives both the Gegenbauer momentum schedule and the
// Sobolev normalization ratios.
class DeltaSequence {
 public:
  DeltaSequence(double alpha, double sigma0) : alpha_(alpha), sigma0_(sigma0) {}

  double gamma(int t) const {
    if (t == 1) return 1.0 / (2.0 * (1.0 + alpha_));
    return t * (t + 2.0 * alpha_ - 1.0) / (4.0 * (t + alpha_) * (t + alpha_ - 1.0));
  }

  double operator()(int t) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (memo_.empty()) memo_.push_back(1.0 / sigma0_);  // delta_1
    while (static_cast<int>(memo_.size()) < t) {
      const int s = static_cast<int>(memo_.size()) + 1;
      memo_.push_back(guarded_inverse(sigma0_ - memo_.back() * gamma(s - 1), s, "delta"));
    }
    return memo_[t - 1];
  }

 private:
  double alpha_, sigma0_;
  mutable std::mutex mu_;
  mutable std::vector<double> memo_;
};

class GegenbauerSchedule final : public ScheduleImpl {
 public:
  GegenbauerSchedule(double alpha, double ell, double big_l)
      : delta_(alpha, -(big_l + ell) / (big_l - ell)),
        sigma0_(-(big_l + ell) / (big_l - ell)),
        width_(big_l - ell) {}

  ScheduleKind kind() const override { return ScheduleKind::TwoSequence; }

  StepCoeffs at(int t) const override {
    const double dt = delta_(t);
    StepCoeffs c;
    c.h = -2.0 * dt / width_;
    c.m = sigma0_ * dt - 1.0;
    return c;
  }

 private:
  DeltaSequence delta_;
  double sigma0_, width_;
};

class SobolevStreaming final : public ScheduleImpl {
 public:
  SobolevStreaming(double alpha, double eta, double ell, double big_l)
      : seq_(alpha, eta * 4.0 / ((big_l - ell) * (big_l - ell))),
        delta_(alpha, -(big_l + ell) / (big_l - ell)),
        sigma0_(-(big_l + ell) / (big_l - ell)),
        width_(big_l - ell) {}

  ScheduleKind kind() const override { return ScheduleKind::ThreeSequence; }

  StepCoeffs at(int t) const override {
    std::lock_guard<std::mutex> lock(mu_);
    extend(t);
    return rows_[t - 1];
  }

 private:
  // Builds rows 1..t of the coefficient table.  kappa_t and a_t need their
  // own history, so rows are produced strictly in order.
  void extend(int t) const {
    while (static_cast<int>(rows_.size()) < t) {
      const int s = static_cast<int>(rows_.size()) + 1;
      rows_.push_back(make_row(s));
    }
  }

  StepCoeffs make_row(int s) const {
    StepCoeffs c;
    const double ds = delta_(s);
    c.h = -2.0 * ds / width_;
    c.m = sigma0_ * ds - 1.0;

    if (s == 1) {
      c.c1 = 0.0;
      c.c2 = 1.0;
      c.c3 = 0.0;
      const double a1 = seq_.d(1) * sigma0_ * sigma0_ / (seq_.xi(1) * seq_.big_k(1));
      push_weights(c, a1, big_a_hist_ + a1);
      kappa_.push_back(1.0);  // kappa_1
      return c;
    }

    const double delta_p = ds * delta_(s - 1);
    if (s == 2) {
      // S_2 = G_2 for the symmetric weight (d_0 = xi_0 cancels exactly), so
      // the z-update reduces to a copy of y_2; the cancelled form below also
      // avoids the divergent xi_0 at alpha -> 0.
      c.c1 = 0.0;
      c.c2 = 1.0;
      c.c3 = 0.0;
      const double a2 = a_hist_[0] * seq_.d(2) /
                        (seq_.xi(2) * seq_.big_k(2) * seq_.big_k(1) * delta_p * delta_p);
      push_weights(c, a2, big_a_hist_ + a2);
      kappa_.push_back(1.0);  // kappa_2
      return c;
    }

    const double d_lag = seq_.d(s - 2);
    const double xi_lag = seq_.xi(s - 2);
    const double kappa_lag = kappa_[s - 3];
    const double kappa_s =
        guarded_inverse(1.0 + (d_lag / kappa_lag - xi_lag) * delta_p, s, "kappa");
    const double tau_s =
        guarded_inverse(d_lag / kappa_lag + 1.0 / delta_p - xi_lag, s, "tau");
    const double delta_s =
        guarded_inverse(d_lag + (1.0 / delta_p - xi_lag) * kappa_lag, s, "delta_s");
    kappa_.push_back(kappa_s);

    c.c1 = d_lag * delta_s;
    c.c2 = kappa_s;
    c.c3 = tau_s * xi_lag;

    const double a_s = a_hist_[0] * seq_.d(s) * xi_lag /
                       (seq_.xi(s) * d_lag * seq_.big_k(s) * seq_.big_k(s - 1) * delta_s * delta_s);
    push_weights(c, a_s, big_a_hist_ + a_s);
    return c;
  }

  // a_hist_ holds (a_{s-2}, a_{s-1}) relative to the next row s.  When the
  // cumulative weight grows past 1e280 the running state is rescaled; only
  // the ratios a_t/A_t ever reach the iteration, so this is harmless.
  void push_weights(StepCoeffs& c, double a, double big_a) const {
    c.a = a;
    c.big_a = big_a;
    a_hist_ = {a_hist_[1], a};
    big_a_hist_ = big_a;
    if (big_a_hist_ > 1e280) {
      const double scale = 1.0 / big_a_hist_;
      a_hist_[0] *= scale;
      a_hist_[1] *= scale;
      big_a_hist_ *= scale;
    }
  }

  SobolevSequences seq_;
  DeltaSequence delta_;
  double sigma0_, width_;

  mutable std::mutex mu_;
  mutable std::vector<StepCoeffs> rows_;
  mutable std::vector<double> kappa_;             // kappa_1, kappa_2, ...
  mutable std::array<double, 2> a_hist_ = {1.0, 1.0};  // (a_{s-2}, a_{s-1}), a_0 = 1
  mutable double big_a_hist_ = 1.0;               // A_{s-1}, A_0 = 1
};

class SobolevAsymptotic final : public ScheduleImpl {
 public:
  SobolevAsymptotic(double ell, double big_l)
      : h_(heavy_ball_step(ell, big_l)), m_(heavy_ball_momentum(ell, big_l)) {}

  ScheduleKind kind() const override { return ScheduleKind::ThreeSequence; }

  StepCoeffs at(int t) const override {
    StepCoeffs c;
    c.h = h_;
    c.m = m_;
    c.c1 = 0.0;
    c.c2 = 1.0 / (1.0 - m_);
    c.c3 = m_ / (1.0 - m_);
    std::lock_guard<std::mutex> lock(mu_);
    extend(t);
    c.a = a_rows_[t - 1];
    c.big_a = big_a_rows_[t - 1];
    return c;
  }

 private:
  void extend(int t) const {
    while (static_cast<int>(a_rows_.size()) < t) {
      a_run_ = a_rows_.empty() ? (1.0 - m_) / m_ : a_run_ / m_;
      big_a_run_ += a_run_;
      if (big_a_run_ > 1e280) {
        const double scale = 1.0 / big_a_run_;
        a_run_ *= scale;
        big_a_run_ = 1.0;
      }
      a_rows_.push_back(a_run_);
      big_a_rows_.push_back(big_a_run_);
    }
  }

  double h_, m_;
  mutable std::mutex mu_;
  mutable std::vector<double> a_rows_, big_a_rows_;
  mutable double a_run_ = 1.0;      // a_0
  mutable double big_a_run_ = 1.0;  // A_0
};

}  // namespace
}  // namespace detail

MethodSchedule::MethodSchedule(std::shared_ptr<const detail::ScheduleImpl> impl)
    : impl_(std::move(impl)) {}

ScheduleKind MethodSchedule::kind() const { return impl_->kind(); }

StepCoeffs MethodSchedule::at(int t) const {
  if (t < 1) throw std::invalid_argument("schedule coefficients are defined for t >= 1");
  return impl_->at(t);
}

MethodSchedule gd_schedule(double h) {
  detail::require(h > 0.0, "gd_schedule requires h > 0");
  return MethodSchedule(std::make_shared<detail::ConstantTwoSeq>(h, 0.0));
}

MethodSchedule gegenbauer_schedule(double alpha, double ell, double big_l) {
  detail::require(alpha > -0.5, "gegenbauer_schedule requires alpha > -1/2");
  detail::check_interval(ell, big_l);
  return MethodSchedule(std::make_shared<detail::GegenbauerSchedule>(alpha, ell, big_l));
}

MethodSchedule chebyshev_schedule(double ell, double big_l) {
  return gegenbauer_schedule(0.0, ell, big_l);
}

double heavy_ball_step(double ell, double big_l) {
  const double s = std::sqrt(ell) + std::sqrt(big_l);
  return 4.0 / (s * s);
}

double heavy_ball_momentum(double ell, double big_l) {
  const double rk = std::sqrt(ell / big_l);
  const double r = (1.0 - rk) / (1.0 + rk);
  return r * r;
}

MethodSchedule heavy_ball_schedule(double ell, double big_l) {
  detail::check_interval(ell, big_l);
  return MethodSchedule(std::make_shared<detail::ConstantTwoSeq>(
      heavy_ball_step(ell, big_l), heavy_ball_momentum(ell, big_l)));
}

MethodSchedule sobolev_schedule(const SobolevParams& params) {
  detail::require(params.alpha > -0.5, "sobolev_schedule requires alpha > -1/2");
  detail::require(params.eta >= 0.0, "sobolev_schedule requires eta >= 0");
  detail::check_interval(params.ell, params.big_l);
  return MethodSchedule(std::make_shared<detail::SobolevStreaming>(
      params.alpha, params.eta, params.ell, params.big_l));
}

MethodSchedule sobolev_asymptotic_schedule(double ell, double big_l) {
  detail::check_interval(ell, big_l);
  return MethodSchedule(std::make_shared<detail::SobolevAsymptotic>(ell, big_l));
}

struct SobolevSequences::Impl {
  double alpha;
  double eta_tilde;
  mutable std::mutex mu;
  mutable std::vector<double> d_memo;  // d_0, d_1, ...
};

SobolevSequences::SobolevSequences(double alpha, double eta_tilde)
    : impl_(std::make_unique<Impl>()) {
  if (alpha <= -0.5) throw std::invalid_argument("SobolevSequences requires alpha > -1/2");
  if (eta_tilde < 0.0) throw std::invalid_argument("SobolevSequences requires eta_tilde >= 0");
  impl_->alpha = alpha;
  impl_->eta_tilde = eta_tilde;
}

SobolevSequences::~SobolevSequences() = default;

double SobolevSequences::alpha() const { return impl_->alpha; }
double SobolevSequences::eta_tilde() const { return impl_->eta_tilde; }

double SobolevSequences::gamma(int t) const {
  if (t < 1) throw std::invalid_argument("gamma is defined for t >= 1");
  const double a = impl_->alpha;
  if (t == 1) return 1.0 / (2.0 * (1.0 + a));
  return t * (t + 2.0 * a - 1.0) / (4.0 * (t + a) * (t + a - 1.0));
}

double SobolevSequences::big_k(int t) const { return gamma(t); }

double SobolevSequences::xi(int t) const {
  if (t < 0) throw std::invalid_argument("xi is defined for t >= 0");
  const double a = impl_->alpha;
  return (t + 2.0) * (t + 1.0) / (4.0 * (t + a + 1.0) * (t + a));
}

double SobolevSequences::d(int t) const {
  if (t < 0) throw std::invalid_argument("d is defined for t >= 0");
  const double a = impl_->alpha;
  const double eta = impl_->eta_tilde;
  std::lock_guard<std::mutex> lock(impl_->mu);
  auto& memo = impl_->d_memo;
  if (memo.empty()) {
    memo.push_back(xi(0));
    memo.push_back(3.0 / (2.0 * (a + 2.0) * (a + 1.0) * (1.0 + 2.0 * eta * (a + 1.0))));
    memo.push_back(3.0 / ((a + 3.0) * (a + 2.0) *
                          (1.0 + eta * 8.0 * (a + 2.0) * (a + 1.0) / (2.0 * a + 1.0))));
  }
  while (static_cast<int>(memo.size()) <= t) {
    const int s = static_cast<int>(memo.size());
    const double gs = gamma(s);
    const double gs1 = gamma(s - 1);
    const double xl = xi(s - 2);
    const double den = gs1 * (eta * s * s + gs) + xl * (xl - memo[s - 2]);
    memo.push_back(xi(s) * gs * gs1 * detail::guarded_inverse(den, s, "d"));
  }
  return memo[t];
}

}  // namespace unrolldiff
