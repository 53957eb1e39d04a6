#include "mfe/geometry/ode.hpp"

#include <algorithm>
#include <cmath>

#include "mfe/errors.hpp"

namespace mfe {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat (embedded 4th order)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeState integrate_dopri5(const OdeRhs& rhs, OdeState y, double t0, double t1,
                          const OdeOptions& opts, const OdeObserver& observer,
                          OdeStats* stats) {
  if (t1 == t0) return y;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double h = std::min(opts.initial_step, span);
  double t = t0;

  OdeState k1 = rhs(t, y);
  long steps = 0;
  OdeStats local;

  while (dir * (t1 - t) > 0) {
    if (++steps > opts.max_steps) {
      fail(ErrorCode::ToleranceNotMet, "dopri5: step budget exhausted");
    }
    const bool last = h >= std::abs(t1 - t);
    if (last) h = std::abs(t1 - t);
    const double hs = dir * h;

    const OdeState k2 = rhs(t + c2 * hs, y + hs * (a21 * k1));
    const OdeState k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    const OdeState k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const OdeState k5 =
        rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const OdeState k6 =
        rhs(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const OdeState y_new =
        y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const OdeState k7 = rhs(t + hs, y_new);

    const OdeState err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err_norm = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err_norm += (err[i] / sc) * (err[i] / sc);
    }
    err_norm = std::sqrt(err_norm / static_cast<double>(y.size()));

    if (err_norm <= 1.0) {
      t = last ? t1 : t + hs;
      y = y_new;
      k1 = k7;
      ++local.accepted;
      if (observer && !observer(t, y)) {
        fail(ErrorCode::ChartExit, "trajectory left the chart domain");
      }
      const double fac = err_norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err_norm, -0.2));
      h *= std::max(0.2, fac);
    } else {
      ++local.rejected;
      h *= std::max(0.1, 0.9 * std::pow(err_norm, -0.2));
      if (h < opts.min_step) {
        fail(ErrorCode::ToleranceNotMet, "dopri5: step size underflow");
      }
    }
  }
  if (stats) *stats = local;
  return y;
}

}  // namespace mfe
