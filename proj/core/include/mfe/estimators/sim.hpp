#pragma once

#include <functional>

#include <Eigen/Core>

namespace mfe {

/// Single-index model Y = g(beta^T X) + eps, eps ~ N(0, sigma2), with beta on
/// the unit hemisphere {|beta| = 1, beta_1 >= 0}.
struct SimData {
  Eigen::MatrixXd x;  ///< n x d
  Eigen::VectorXd y;
  Eigen::VectorXd beta;
  std::function<double(double)> g;
  std::function<double(double)> g_prime;
  double sigma2 = 1.0;
  /// zeta(u) = E[X | beta^T X = u]; d-vector.
  std::function<Eigen::VectorXd(double)> zeta;
};

/// d x (d-1) orthonormal basis of {h : h^T beta = 0} from the Householder
/// reflection mapping e_1 to beta.
Eigen::MatrixXd sim_tangent_basis(const Eigen::VectorXd& beta);

/// cos(t|h|) beta + sin(t|h|) h/|h|. Throws NotTangent if |h^T beta| > 1e-10.
Eigen::VectorXd sim_exp(const Eigen::VectorXd& beta, const Eigen::VectorXd& h, double t);

/// Per-observation score (eps / sigma2) g'(u) X^T h.
Eigen::VectorXd sim_score(const SimData& data, const Eigen::VectorXd& h);

/// Per-observation efficient score (eps / sigma2) g'(u) (X - zeta(u))^T h.
Eigen::VectorXd sim_efficient_score(const SimData& data, const Eigen::VectorXd& h);

/// Empirical efficient information B^T E[S_eff S_eff^T] B in tangent-basis
/// coordinates.
Eigen::MatrixXd sim_efficient_information(const SimData& data);

/// Inverse of sim_efficient_information. Throws SingularEfficientInformation.
Eigen::MatrixXd sim_efficiency_bound(const SimData& data);

/// Nadaraya-Watson estimate of zeta from (beta^T X_i, X_i) with a Gaussian
/// kernel; bandwidth <= 0 selects Silverman's rule. The kernel is truncated
/// at 5 bandwidths.
std::function<Eigen::VectorXd(double)> nadaraya_watson_zeta(const Eigen::MatrixXd& x,
                                                            const Eigen::VectorXd& beta,
                                                            double bandwidth = 0.0);

}  // namespace mfe
