#pragma once

#include <vector>

#include <Eigen/Core>

#include "mfe/errors.hpp"
#include "mfe/geometry/manifold.hpp"
#include "mfe/types.hpp"

namespace mfe {

/// Per-observation influence values in orthonormal-frame coordinates at
/// `base`; one row per observation.
struct InfluenceSample {
  Vec base;
  Eigen::MatrixXd rows;

  Eigen::VectorXd column_means() const;
  Eigen::MatrixXd covariance() const;
};

struct FrechetOptions {
  double step = 1.0;
  double tol = 1e-9;
  int max_iter = 500;
  bool compute_influence = false;
  int workers = 1;
};

struct FrechetResult {
  Vec estimate;
  /// Number of gradient evaluations (a single point converges in 1).
  int iterations = 0;
  double final_grad_norm = 0.0;
  /// {E[Hess d^2/2]}^{-1} at the estimate (frame coordinates); empty unless
  /// influence was requested.
  Mat influence_matrix;
  InfluenceSample per_obs_if;
  /// All observations coincide: the influence values are identically zero.
  bool degenerate = false;
};

/// Karcher iteration mu <- exp(mu, step * mean log(mu, X_i)) from the first
/// observation. On non-Hadamard manifolds the sample must fit in a ball of
/// diameter below convex_diameter(); otherwise throws NonConvexRegion.
FrechetResult frechet_mean(const Manifold& m, const std::vector<Vec>& sample,
                           const FrechetOptions& opt = {});

/// Frechet mean if it is farther than n^{-1/4} from `reference`, else
/// `reference`.
Vec hodges(const Manifold& m, const std::vector<Vec>& sample, const Vec& reference,
           const FrechetOptions& opt = {});
Vec hodges_from_mean(const Manifold& m, const Vec& mean, const Vec& reference, int n);

enum class InfluenceMode {
  /// Average of the Hessians of d(., X_i)^2 / 2 at mu0 (numeric).
  Jacobian,
  /// I - R(Sigma_hat) / 3 from the curvature operator.
  Curvature,
};

/// IF_i = {E[Hess d^2/2]}^{-1} log(mu0, X_i). Throws SingularMean when the
/// averaged matrix is numerically singular. `matrix_out` receives the
/// (un-inverted) averaged matrix.
InfluenceSample influence_frechet(const Manifold& m, const std::vector<Vec>& sample, const Vec& mu0,
                                  InfluenceMode mode, Mat* matrix_out = nullptr, int workers = 1);

/// Inverse of a (not necessarily symmetric) square matrix; throws `code` when
/// the reciprocal condition number is below 1e-12.
Mat checked_inverse(const Mat& a, ErrorCode code);

}  // namespace mfe
