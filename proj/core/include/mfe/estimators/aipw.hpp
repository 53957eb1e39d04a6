#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mfe/estimators/frechet.hpp"
#include "mfe/geometry/manifold.hpp"

namespace mfe {

struct MarObservation {
  bool observed = false;   ///< R
  std::optional<Vec> x;    ///< present iff observed
  Eigen::VectorXd z;       ///< covariates
};

/// pi(z) = P(R = 1 | Z = z).
using PropensityFn = std::function<double(const Eigen::VectorXd& z)>;
/// m(mu, z) = E[log(mu, X) | Z = z, R = 1], chart components at mu.
using OutcomeFn = std::function<Vec(const Vec& mu, const Eigen::VectorXd& z)>;

/// Logistic regression P(R = 1 | z) = 1 / (1 + exp(-(c0 + c^T z))).
struct LogisticFit {
  Eigen::VectorXd coef;  ///< [c0, c...]
  double operator()(const Eigen::VectorXd& z) const;
};

/// Newton-Raphson fit. When every observation is complete the fit is the
/// constant 1 (the MLE diverges; its limit is used).
LogisticFit fit_logistic(const std::vector<MarObservation>& obs);

struct AipwOptions {
  double step = 1.0;
  double tol = 1e-9;
  int max_iter = 500;
  double pi_floor = 0.01;
  /// Known propensity; when unset a logistic model is fitted.
  PropensityFn pi;
  /// Known outcome regression; when unset m is refit at every iterate as a
  /// coordinatewise linear regression of frame-coordinate logs on [1, z]
  /// among complete cases.
  OutcomeFn m;
  int workers = 1;
};

struct AipwResult {
  Vec estimate;
  int iterations = 0;
  double final_grad_norm = 0.0;
  InfluenceSample if_sample;
  /// Leading matrix E[R / pi * Hess d^2/2] before inversion (frame coords).
  Mat leading_matrix;
};

/// Augmented IPW estimating function evaluated at mu, one row per
/// observation, in frame coordinates at mu.
Eigen::MatrixXd aipw_terms(const Manifold& m, const std::vector<MarObservation>& obs, const Vec& mu,
                           const PropensityFn& pi, const OutcomeFn& outcome);

/// Solves mean_i [R/pi log(mu, X) - (R/pi - 1) m(Z)] = 0 by the Karcher-type
/// iteration from the first complete observation. Throws PositivityViolation
/// when any pi(Z_i) falls below the floor, NotConverged on the iteration cap.
AipwResult aipw_frechet(const Manifold& m, const std::vector<MarObservation>& obs,
                        const AipwOptions& opt = {});

}  // namespace mfe
