#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfe/geometry/manifold.hpp"
#include "mfe/stats/random.hpp"

namespace mfe {

struct CheckRow {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  /// "<", "<=", ">" or ">=": pass iff `measured relation tolerance`.
  std::string relation = "<";
  bool pass = false;
};

struct CheckReport {
  std::string manifold;
  std::vector<CheckRow> rows;

  bool all_pass() const;
  std::string table() const;
};

struct CheckOptions {
  std::uint64_t seed = 20240611;
  int cases = 100;
};

/// Random point exp(ref, E v) with |v| uniform in [0, radius].
Vec random_point(const Manifold& m, Rng& rng, double radius);
/// Random tangent at x with frame coordinates N(0, scale^2 I).
Vec random_tangent(const Manifold& m, const Vec& x, Rng& rng, double scale = 1.0);

/// Max coordinate error of the ODE pipeline against closed forms (exp, log,
/// transport) over `cases` random inputs. Manifold must have closed forms.
struct OracleErrors {
  double exp = 0.0;
  double log = 0.0;
  double transport = 0.0;
};
OracleErrors closed_form_errors(const Manifold& m, const CheckOptions& opt = {});

/// Worst relative error of <Pi u, Pi v> against <u, v>.
double transport_isometry_error(const Manifold& m, const CheckOptions& opt = {});
/// Worst relative error of log(x, exp(x, v)) against v.
double round_trip_error(const Manifold& m, const CheckOptions& opt = {});
/// Worst |speed(t)/speed(0) - 1| at ten checkpoints along random geodesics.
double speed_drift(const Manifold& m, const CheckOptions& opt = {});

struct SlopeResult {
  std::vector<double> scales;
  std::vector<double> residuals;
  double slope = 0.0;
};

/// |dexp(x, t h) - (I + R(th, .)th / 6)| over shrinking t.
SlopeResult jacobi_series_slope(const Manifold& m, const CheckOptions& opt = {});
/// First-order expansion of y -> log(mu, y) around mu2 (log-map expansion).
SlopeResult log_expansion_slope(const Manifold& m, const CheckOptions& opt = {});
/// First-order expansion of mu -> Pi log(mu, mu_dagger) (transport expansion).
SlopeResult transport_expansion_slope(const Manifold& m, const CheckOptions& opt = {});

/// Runs the full invariant suite.
CheckReport geometry_check(const Manifold& m, const CheckOptions& opt = {});

}  // namespace mfe
