#include "mfe/bounds/crlb.hpp"

#include "mfe/errors.hpp"
#include "mfe/stats/linalg.hpp"

namespace mfe {

namespace {

Mat information_inverse(const FisherInfo& g) {
  if (g.matrix.rows() != g.matrix.cols()) fail(ErrorCode::DimensionMismatch, "Fisher information is not square");
  return sym_inverse(g.matrix);
}

void check_dpsi(const Mat& dpsi, long dim) {
  if (dpsi.cols() != dim) fail(ErrorCode::DimensionMismatch, "dpsi columns must match the parameter dimension");
}

Mat corrected(const Mat& c, const CurvatureOperator& r, const Mat& dpsi) {
  const Mat rc = r.apply(c);
  return symmetrize(dpsi * (c - (rc * c + c * rc) / 3.0) * dpsi.transpose());
}

}  // namespace

Mat crlb_curved(const FisherInfo& g, const CurvatureOperator& r, const Mat& dpsi) {
  return crlb_n(g, r, dpsi, 1);
}

Mat crlb_curved(const FisherInfo& g, const Manifold& m, const Vec& x, const Mat& dpsi) {
  return crlb_curved(g, normal_coefficients(m, x), dpsi);
}

Mat crlb_n(const FisherInfo& g, const CurvatureOperator& r, const Mat& dpsi, int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "crlb_n: n must be positive");
  const Mat c = information_inverse(g);
  check_dpsi(dpsi, c.rows());
  if (r.dim() != c.rows()) fail(ErrorCode::DimensionMismatch, "crlb: curvature operator dimension");
  return corrected(c / static_cast<double>(n), r, dpsi);
}

Mat crlb_n(const FisherInfo& g, const Manifold& m, const Vec& x, const Mat& dpsi, int n) {
  return crlb_n(g, normal_coefficients(m, x), dpsi, n);
}

Mat crlb_asymptotic(const FisherInfo& g, const Mat& dpsi) {
  const Mat c = information_inverse(g);
  check_dpsi(dpsi, c.rows());
  return symmetrize(dpsi * c * dpsi.transpose());
}

Mat convolution_reference(const FisherInfo& g, const Mat& dpsi) { return crlb_asymptotic(g, dpsi); }

Mat lam_reference(const FisherInfo& g, const Mat& dpsi) { return crlb_asymptotic(g, dpsi); }

double psd_gap(const Mat& empirical, const Mat& bound) {
  if (empirical.rows() != bound.rows() || empirical.cols() != bound.cols() || empirical.rows() != empirical.cols()) {
    fail(ErrorCode::DimensionMismatch, "psd_gap: shape mismatch");
  }
  return min_eigenvalue(empirical - bound);
}

}  // namespace mfe
