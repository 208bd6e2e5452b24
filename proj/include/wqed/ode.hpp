#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace wqed::ode {

struct Dopri5Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_initial = 0.0;  // 0 picks a step from the initial derivative
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

enum class Dopri5Status { Ok, NonFinite, StepUnderflow, TooManySteps };

struct Dopri5Stats {
  Dopri5Status status = Dopri5Status::Ok;
  long accepted = 0;
  long rejected = 0;
  double h_last = 0.0;  // feed back as h_initial to continue a run
};

namespace detail {

template <class Vec>
double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
  using std::abs;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(abs(y0[i]), abs(y1[i]));
    const double r = abs(err[i]) / sc;
    sum += r * r;
  }
  return err.size() == 0 ? 0.0 : std::sqrt(sum / static_cast<double>(err.size()));
}

template <class Vec>
bool all_finite(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(std::abs(v[i]))) return false;
  }
  return true;
}

}  // namespace detail

// Adaptive Dormand-Prince 5(4) integration of y' = f(t, y) from t0 to t1,
// overwriting y. `observer(t, y)` runs after every accepted step and may
// return false to stop early.
template <class Vec, class Rhs, class Observer>
Dopri5Stats dopri5(Rhs&& f, double t0, double t1, Vec& y, const Dopri5Options& opt, Observer&& observer) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  Dopri5Stats stats;
  const double span = t1 - t0;
  if (!(span > 0.0)) return stats;

  Vec k1 = f(t0, y);
  Vec k2, k3, k4, k5, k6, k7, y_new, err;

  double h = opt.h_initial;
  if (!(h > 0.0)) {
    const double d0 = detail::error_norm(y, y, y, opt.rtol, opt.atol);
    const double d1 = detail::error_norm(k1, y, y, opt.rtol, opt.atol);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * std::max(1.0, span) : 0.01 * d0 / d1;
  }
  h = std::min({h, opt.h_max, span});

  constexpr double safety = 0.9, fac_min = 0.2, fac_max = 5.0;
  constexpr double alpha = 0.7 / 5.0, beta = 0.4 / 5.0;
  double err_prev = 1e-4;
  bool last_rejected = false;

  double t = t0;
  while (t < t1) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      stats.status = Dopri5Status::TooManySteps;
      break;
    }
    bool final_step = false;
    const double h_proposed = h;
    if (t + 1.01 * h >= t1) {
      h = t1 - t;
      final_step = true;
    }

    k2 = f(t + c2 * h, (y + h * a21 * k1).eval());
    k3 = f(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
    k4 = f(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    k5 = f(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    k6 = f(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    k7 = f(t + h, y_new);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double en = detail::error_norm(err, y, y_new, opt.rtol, opt.atol);
    if (!std::isfinite(en)) en = 1e10;

    if (en <= 1.0) {
      if (!detail::all_finite(y_new)) {
        stats.status = Dopri5Status::NonFinite;
        break;
      }
      t = final_step ? t1 : t + h;
      y.swap(y_new);
      k1.swap(k7);
      ++stats.accepted;
      stats.h_last = final_step ? std::max(h, h_proposed) : h;

      double fac = en == 0.0 ? fac_max : safety * std::pow(en, -alpha) * std::pow(err_prev, beta);
      fac = std::clamp(fac, fac_min, last_rejected ? 1.0 : fac_max);
      err_prev = std::max(en, 1e-4);
      last_rejected = false;
      if (!final_step) h = std::min(h * fac, opt.h_max);
      if (!observer(t, static_cast<const Vec&>(y))) break;
    } else {
      ++stats.rejected;
      last_rejected = true;
      h *= std::max(fac_min, safety * std::pow(en, -alpha));
      if (h < 1e-14 * std::max(1.0, std::abs(t))) {
        stats.status = Dopri5Status::StepUnderflow;
        break;
      }
    }
  }
  return stats;
}

template <class Vec, class Rhs>
Dopri5Stats dopri5(Rhs&& f, double t0, double t1, Vec& y, const Dopri5Options& opt = {}) {
  return dopri5(std::forward<Rhs>(f), t0, t1, y, opt, [](double, const Vec&) { return true; });
}

}  // namespace wqed::ode
