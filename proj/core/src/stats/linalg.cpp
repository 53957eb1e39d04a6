#include "mfe/stats/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "mfe/errors.hpp"

namespace mfe {

Eigen::MatrixXd orthonormal_complement(const Eigen::VectorXd& u) {
  const auto d = u.size();
  if (d < 2) fail(ErrorCode::InvalidArgument, "orthonormal_complement: dimension < 2");
  const double s = u[0] >= 0.0 ? 1.0 : -1.0;
  Eigen::VectorXd w = u;
  w[0] += s * u.norm();
  const double ww = w.squaredNorm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d);
  if (ww > 0.0) h -= (2.0 / ww) * w * w.transpose();
  return h.rightCols(d - 1);
}

Mat symmetrize(const Mat& a) { return 0.5 * (a + a.transpose()); }

double min_eigenvalue(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Mat sym_inverse(const Mat& a, double tol) {
  const Mat s = symmetrize(a);
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  const Vec ev = es.eigenvalues();
  const double big = ev.cwiseAbs().maxCoeff();
  if (!(big > 0.0) || ev.cwiseAbs().minCoeff() <= tol * big) {
    fail(ErrorCode::SingularInformation, "matrix is numerically singular");
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

double frobenius_relative(const Mat& a, const Mat& b) { return (a - b).norm() / b.norm(); }

double loglog_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::ArrayXd lx = x.array().log();
  const Eigen::ArrayXd ly = y.array().log();
  const double mx = lx.mean(), my = ly.mean();
  return ((lx - mx) * (ly - my)).sum() / ((lx - mx).square().sum());
}

}  // namespace mfe
