#pragma once

// Adaptive Dormand-Prince 5(4) integrator with local extrapolation: the error
// is estimated from the embedded 4th-order solution and the step is advanced
// with the 5th-order one.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace scvx {

struct Tolerance {
  double rel = 1e-10;
  double abs = 1e-12;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, int segment, double t_reached)
      : std::runtime_error(what + " (segment " + std::to_string(segment) + ", t = " +
                           std::to_string(t_reached) + ")"),
        segment_(segment),
        t_reached_(t_reached) {}
  int segment() const { return segment_; }
  double t_reached() const { return t_reached_; }

 private:
  int segment_;
  double t_reached_;
};

struct StepStats {
  int accepted = 0;
  int rejected = 0;
};

namespace detail {
struct NoObserver {
  template <class V>
  void operator()(double, const V&, const V&, double, const V&, const V&) const {}
};
}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 in place. `f(t, y, dydt)` writes the
/// derivative. `h` carries the step-size guess in and the last accepted
/// proposal out, so consecutive segments can chain it. `observer` receives
/// every accepted step as (t0, y0, f0, t1, y1, f1).
template <class Vec, class Rhs, class Observer = detail::NoObserver>
StepStats dopri5(Rhs&& f, double t0, double t1, Vec& y, const Tolerance& tol, double& h,
                 int segment = 0, Observer&& observer = {}) {
  // Butcher tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  StepStats stats;
  const double span = t1 - t0;
  if (!(span > 0.0)) {
    return stats;
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    h = 0.05 * span;
  }

  Vec k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, err = y;
  f(t0, y, k1);
  double t = t0;
  bool last_rejected = false;
  const double min_step = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t1));

  while (t < t1) {
    bool final_step = false;
    const double h_proposed = h;
    if (t + h >= t1 || t + 1.01 * h >= t1) {
      h = t1 - t;
      final_step = true;
    }
    if (h < min_step) {
      throw IntegrationError("step size underflow", segment, t);
    }

    ytmp = y + h * (a21 * k1);
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const double t_new = final_step ? t1 : t + h;
    f(t_new, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double r = err[i] / sc;
      acc += r * r;
    }
    const double err_norm = std::sqrt(acc / static_cast<double>(y.size()));
    if (!std::isfinite(err_norm)) {
      throw IntegrationError("non-finite derivative", segment, t);
    }

    if (err_norm <= 1.0) {
      observer(t, y, k1, t_new, ynew, k7);
      t = t_new;
      y = ynew;
      k1 = k7;
      ++stats.accepted;
      double fac = err_norm > 0.0 ? 0.9 * std::pow(err_norm, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      last_rejected = false;
      h = final_step ? std::max(h * fac, h_proposed) : h * fac;
    } else {
      ++stats.rejected;
      last_rejected = true;
      h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
    }
  }
  return stats;
}

/// Cubic Hermite interpolation on an accepted step.
template <class Vec>
Vec hermite(double t0, const Vec& y0, const Vec& f0, double t1, const Vec& y1, const Vec& f1,
            double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2,
               h11 = s3 - s2;
  return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

}  // namespace scvx
