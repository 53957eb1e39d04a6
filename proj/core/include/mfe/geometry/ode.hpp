#pragma once

#include <functional>

#include <Eigen/Core>

namespace mfe {

inline constexpr int kMaxOdeState = 4 * 8;

using OdeState = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxOdeState, 1>;

struct OdeOptions {
  double atol = 1e-10;
  double rtol = 1e-10;
  double initial_step = 1e-2;
  double min_step = 1e-14;
  long max_steps = 200000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

/// Right-hand side y' = f(t, y).
using OdeRhs = std::function<OdeState(double, const OdeState&)>;

/// Called after every accepted step with (t, y). Returning false aborts the
/// integration with ErrorCode::ChartExit.
using OdeObserver = std::function<bool(double, const OdeState&)>;

/// Dormand-Prince 5(4) with PI-free classic step control. Integrates from t0
/// to t1 (either direction) and returns y(t1). Throws ToleranceNotMet when the
/// step size underflows or the step budget is exhausted.
OdeState integrate_dopri5(const OdeRhs& rhs, OdeState y0, double t0, double t1,
                          const OdeOptions& opts = {}, const OdeObserver& observer = {},
                          OdeStats* stats = nullptr);

}  // namespace mfe
