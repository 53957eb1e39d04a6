#pragma once

#include <Eigen/Core>

#include "mfe/types.hpp"

namespace mfe {

/// Columns of the Householder reflector that sends `u` to a multiple of e_1,
/// minus the first: an orthonormal basis of the hyperplane orthogonal to the
/// unit vector `u`. Deterministic in `u`.
Eigen::MatrixXd orthonormal_complement(const Eigen::VectorXd& u);

Mat symmetrize(const Mat& a);
double min_eigenvalue(const Mat& a);
double max_eigenvalue(const Mat& a);

/// Inverse of a symmetric matrix; throws SingularInformation when the smallest eigenvalue
/// magnitude falls below `tol` relative to the largest.
Mat sym_inverse(const Mat& a, double tol = 1e-12);

/// Frobenius-relative distance |a - b|_F / |b|_F.
double frobenius_relative(const Mat& a, const Mat& b);

/// Slope of the least-squares line through (log x_i, log y_i).
double loglog_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace mfe
