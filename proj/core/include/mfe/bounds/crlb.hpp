#pragma once

#include <string>

#include "mfe/geometry/manifold.hpp"
#include "mfe/geometry/ops.hpp"
#include "mfe/models/gaussian.hpp"
#include "mfe/types.hpp"

namespace mfe {

struct BoundReport {
  std::string label;
  int n = 0;
  Mat bound_matrix;
  Mat empirical_cov;
  /// Smallest eigenvalue of empirical_cov - bound_matrix.
  double gap_min_eig = 0.0;
  double slack = 0.0;
  bool pass = false;
};

/// dpsi (C - (R(C) C + C R(C)) / 3) dpsi^T with C = G^{-1}, R at x.
/// Throws SingularInformation.
Mat crlb_curved(const FisherInfo& g, const Manifold& m, const Vec& x, const Mat& dpsi);
Mat crlb_curved(const FisherInfo& g, const CurvatureOperator& r, const Mat& dpsi);

/// The same bound for n observations, C = G^{-1} / n. This is a bound on the
/// estimator covariance (order 1/n); n * crlb_n tends to crlb_asymptotic.
Mat crlb_n(const FisherInfo& g, const Manifold& m, const Vec& x, const Mat& dpsi, int n);
Mat crlb_n(const FisherInfo& g, const CurvatureOperator& r, const Mat& dpsi, int n);

/// dpsi G^{-1} dpsi^T.
Mat crlb_asymptotic(const FisherInfo& g, const Mat& dpsi);
/// Optimal limiting covariance of regular estimators; same matrix.
Mat convolution_reference(const FisherInfo& g, const Mat& dpsi);
/// E[Z Z^T] for Z ~ N(0, dpsi G^{-1} dpsi^T); same matrix.
Mat lam_reference(const FisherInfo& g, const Mat& dpsi);

/// Smallest eigenvalue of sym(empirical - bound). Throws DimensionMismatch.
double psd_gap(const Mat& empirical, const Mat& bound);

}  // namespace mfe
