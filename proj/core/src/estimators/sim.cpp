#include "mfe/estimators/sim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "mfe/errors.hpp"
#include "mfe/stats/linalg.hpp"

namespace mfe {

Eigen::MatrixXd sim_tangent_basis(const Eigen::VectorXd& beta) {
  const long d = beta.size();
  if (d < 2) fail(ErrorCode::InvalidArgument, "sim_tangent_basis: dimension must be at least 2");
  if (std::abs(beta.norm() - 1.0) > 1e-10) fail(ErrorCode::InvalidArgument, "sim_tangent_basis: beta must be a unit vector");
  return orthonormal_complement(beta);
}

Eigen::VectorXd sim_exp(const Eigen::VectorXd& beta, const Eigen::VectorXd& h, double t) {
  if (h.size() != beta.size()) fail(ErrorCode::DimensionMismatch, "sim_exp: dimension mismatch");
  if (std::abs(h.dot(beta)) > 1e-10) fail(ErrorCode::NotTangent, "sim_exp: h is not orthogonal to beta");
  const double r = std::abs(t) * h.norm();
  if (r == 0.0) return beta;
  const double sgn = t < 0.0 ? -1.0 : 1.0;
  Eigen::VectorXd out = std::cos(r) * beta + (sgn * std::sin(r) / h.norm()) * h;
  return out / out.norm();
}

namespace {

double eps_weight(const SimData& d, long i, double u) {
  return (d.y[i] - d.g(u)) * d.g_prime(u) / d.sigma2;
}

void check(const SimData& d) {
  if (d.x.rows() != d.y.size() || d.x.cols() != d.beta.size()) {
    fail(ErrorCode::DimensionMismatch, "SimData: inconsistent dimensions");
  }
  if (!(d.sigma2 > 0.0)) fail(ErrorCode::InvalidArgument, "SimData: sigma2 must be positive");
}

}  // namespace

Eigen::VectorXd sim_score(const SimData& data, const Eigen::VectorXd& h) {
  check(data);
  const Eigen::VectorXd u = data.x * data.beta;
  const Eigen::VectorXd xh = data.x * h;
  Eigen::VectorXd s(u.size());
  for (long i = 0; i < u.size(); ++i) s[i] = eps_weight(data, i, u[i]) * xh[i];
  return s;
}

Eigen::VectorXd sim_efficient_score(const SimData& data, const Eigen::VectorXd& h) {
  check(data);
  if (!data.zeta) fail(ErrorCode::InvalidArgument, "sim_efficient_score: zeta not supplied");
  const Eigen::VectorXd u = data.x * data.beta;
  Eigen::VectorXd s(u.size());
  for (long i = 0; i < u.size(); ++i) {
    const Eigen::VectorXd c = data.x.row(i).transpose() - data.zeta(u[i]);
    s[i] = eps_weight(data, i, u[i]) * c.dot(h);
  }
  return s;
}

Eigen::MatrixXd sim_efficient_information(const SimData& data) {
  check(data);
  if (!data.zeta) fail(ErrorCode::InvalidArgument, "sim_efficient_information: zeta not supplied");
  const Eigen::MatrixXd b = sim_tangent_basis(data.beta);
  const long n = data.x.rows();
  const Eigen::VectorXd u = data.x * data.beta;
  Eigen::MatrixXd rows(n, b.cols());
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd c = data.x.row(i).transpose() - data.zeta(u[i]);
    rows.row(i) = eps_weight(data, i, u[i]) * (b.transpose() * c).transpose();
  }
  return rows.transpose() * rows / static_cast<double>(n);
}

Eigen::MatrixXd sim_efficiency_bound(const SimData& data) {
  const Eigen::MatrixXd info = sim_efficient_information(data);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  const auto& ev = es.eigenvalues();
  if (!(ev[0] > 1e-12 * std::max(1.0, ev[ev.size() - 1]))) {
    fail(ErrorCode::SingularEfficientInformation, "SIM efficient information is singular");
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

std::function<Eigen::VectorXd(double)> nadaraya_watson_zeta(const Eigen::MatrixXd& x,
                                                            const Eigen::VectorXd& beta,
                                                            double bandwidth) {
  const long n = x.rows();
  if (n < 2) fail(ErrorCode::InvalidArgument, "nadaraya_watson_zeta: need at least two points");
  const Eigen::VectorXd u = x * beta;
  if (bandwidth <= 0.0) {
    const double mean = u.mean();
    const double sd = std::sqrt((u.array() - mean).square().sum() / static_cast<double>(n - 1));
    bandwidth = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
    if (!(bandwidth > 0.0)) fail(ErrorCode::InvalidArgument, "nadaraya_watson_zeta: degenerate index");
  }
  std::vector<long> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(), [&](long a, long b) { return u[a] < u[b]; });
  auto us = std::make_shared<std::vector<double>>();
  auto xs = std::make_shared<Eigen::MatrixXd>(n, x.cols());
  for (long k = 0; k < n; ++k) {
    us->push_back(u[order[static_cast<size_t>(k)]]);
    xs->row(k) = x.row(order[static_cast<size_t>(k)]);
  }
  return [us, xs, bandwidth](double t) -> Eigen::VectorXd {
    const auto lo = std::lower_bound(us->begin(), us->end(), t - 5.0 * bandwidth);
    const auto hi = std::upper_bound(us->begin(), us->end(), t + 5.0 * bandwidth);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(xs->cols());
    double wsum = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double z = (*it - t) / bandwidth;
      const double w = std::exp(-0.5 * z * z);
      acc += w * xs->row(it - us->begin()).transpose();
      wsum += w;
    }
    if (wsum == 0.0) {
      // Outside the data range: nearest observation.
      const long k = lo == us->end() ? static_cast<long>(us->size()) - 1 : lo - us->begin();
      return xs->row(k).transpose();
    }
    return acc / wsum;
  };
}

}  // namespace mfe
