#include "mfe/estimators/aipw.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mfe/errors.hpp"
#include "mfe/geometry/ops.hpp"

namespace mfe {

double LogisticFit::operator()(const Eigen::VectorXd& z) const {
  if (coef.size() == 0) return 1.0;
  const double eta = coef[0] + coef.tail(coef.size() - 1).dot(z);
  return 1.0 / (1.0 + std::exp(-eta));
}

LogisticFit fit_logistic(const std::vector<MarObservation>& obs) {
  if (obs.empty()) fail(ErrorCode::InvalidArgument, "fit_logistic: no observations");
  if (std::all_of(obs.begin(), obs.end(), [](const MarObservation& o) { return o.observed; })) return {};
  const long n = static_cast<long>(obs.size());
  const long p = obs.front().z.size() + 1;
  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd y(n);
  for (long i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design.row(i).tail(p - 1) = obs[static_cast<size_t>(i)].z.transpose();
    y[i] = obs[static_cast<size_t>(i)].observed ? 1.0 : 0.0;
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int it = 0; it < 100; ++it) {
    const Eigen::ArrayXd prob = 1.0 / (1.0 + (-(design * beta).array()).exp());
    const Eigen::VectorXd grad = design.transpose() * (y.array() - prob).matrix();
    const Eigen::VectorXd w = prob * (1.0 - prob);
    Eigen::MatrixXd info = design.transpose() * w.asDiagonal() * design;
    info.diagonal().array() += 1e-10;
    const Eigen::VectorXd delta = info.ldlt().solve(grad);
    beta += delta;
    if (delta.norm() < 1e-12 * (1.0 + beta.norm())) break;
  }
  if (!beta.allFinite()) fail(ErrorCode::NotConverged, "fit_logistic: Newton iteration diverged");
  return {beta};
}

namespace {

// Least-squares fit of frame-coordinate logs on [1, z] among complete cases;
// returns the fitted m(z) in chart components at mu.
OutcomeFn linear_outcome(const Manifold& m, const std::vector<MarObservation>& obs, const Vec& mu) {
  std::vector<const MarObservation*> cc;
  for (const auto& o : obs)
    if (o.observed) cc.push_back(&o);
  const long n = static_cast<long>(cc.size());
  const long p = obs.front().z.size() + 1;
  const int d = m.dim();
  if (n < p) fail(ErrorCode::InvalidArgument, "aipw: too few complete cases for the outcome model");
  Eigen::MatrixXd design(n, p), target(n, d);
  for (long i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design.row(i).tail(p - 1) = cc[static_cast<size_t>(i)]->z.transpose();
    target.row(i) = to_frame(m, mu, log_map(m, mu, *cc[static_cast<size_t>(i)]->x)).transpose();
  }
  const Eigen::MatrixXd coef = design.colPivHouseholderQr().solve(target);
  const Mat e = m.frame(mu);
  return [coef, e, p](const Vec&, const Eigen::VectorXd& z) -> Vec {
    Eigen::VectorXd row(p);
    row << 1.0, z;
    const Eigen::VectorXd f = coef.transpose() * row;
    return e * Vec(f);
  };
}

}  // namespace

namespace {

Eigen::MatrixXd terms_with(const Manifold& m, const std::vector<MarObservation>& obs, const Vec& mu,
                           const std::vector<double>& pis, const OutcomeFn& outcome) {
  const int d = m.dim();
  Eigen::MatrixXd rows(static_cast<long>(obs.size()), d);
  for (size_t i = 0; i < obs.size(); ++i) {
    const MarObservation& o = obs[i];
    const double w = (o.observed ? 1.0 : 0.0) / pis[i];
    Vec t = Vec::Zero(d);
    if (o.observed) t += w * to_frame(m, mu, log_map(m, mu, *o.x));
    if (w != 1.0) t -= (w - 1.0) * to_frame(m, mu, outcome(mu, o.z));
    rows.row(static_cast<long>(i)) = t.transpose();
  }
  return rows;
}

}  // namespace

Eigen::MatrixXd aipw_terms(const Manifold& m, const std::vector<MarObservation>& obs, const Vec& mu,
                           const PropensityFn& pi, const OutcomeFn& outcome) {
  std::vector<double> pis(obs.size());
  for (size_t i = 0; i < obs.size(); ++i) pis[i] = pi(obs[i].z);
  return terms_with(m, obs, mu, pis, outcome);
}

AipwResult aipw_frechet(const Manifold& m, const std::vector<MarObservation>& obs, const AipwOptions& opt) {
  if (obs.empty()) fail(ErrorCode::InvalidArgument, "aipw: no observations");
  for (const auto& o : obs) {
    if (o.observed != o.x.has_value()) fail(ErrorCode::InvalidArgument, "aipw: X must be present iff R = 1");
  }
  const auto first = std::find_if(obs.begin(), obs.end(), [](const MarObservation& o) { return o.observed; });
  if (first == obs.end()) fail(ErrorCode::InvalidArgument, "aipw: no complete observations");

  PropensityFn pi = opt.pi;
  if (!pi) pi = [fit = fit_logistic(obs)](const Eigen::VectorXd& z) { return fit(z); };
  std::vector<double> pis(obs.size());
  for (size_t i = 0; i < obs.size(); ++i) {
    pis[i] = pi(obs[i].z);
    if (!(pis[i] >= opt.pi_floor)) fail(ErrorCode::PositivityViolation, "aipw: propensity below the positivity floor");
  }
  // With every pi equal to 1 the augmentation term vanishes and m is unused.
  const bool need_m = std::any_of(pis.begin(), pis.end(), [](double p) { return p != 1.0; }) ||
                      std::any_of(obs.begin(), obs.end(), [](const MarObservation& o) { return !o.observed; });
  auto outcome_at = [&](const Vec& mu) -> OutcomeFn {
    if (opt.m) return opt.m;
    if (!need_m) return [](const Vec& mu0, const Eigen::VectorXd&) { return Vec(Vec::Zero(mu0.size())); };
    return linear_outcome(m, obs, mu);
  };

  const int d = m.dim();
  AipwResult res;
  Vec mu = *first->x;
  for (int it = 1;; ++it) {
    // Chart-space accumulation in the same order as frechet_mean, so the
    // complete-data case reproduces it exactly.
    const OutcomeFn outcome = outcome_at(mu);
    Vec grad = Vec::Zero(m.chart_dim());
    for (size_t i = 0; i < obs.size(); ++i) {
      const double w = (obs[i].observed ? 1.0 : 0.0) / pis[i];
      if (w == 1.0) {
        grad += log_map(m, mu, *obs[i].x);
      } else {
        if (obs[i].observed) grad += w * log_map(m, mu, *obs[i].x);
        grad -= (w - 1.0) * outcome(mu, obs[i].z);
      }
    }
    grad *= 1.0 / static_cast<double>(obs.size());
    res.iterations = it;
    res.final_grad_norm = norm(m, mu, grad);
    if (res.final_grad_norm < opt.tol) break;
    if (it >= opt.max_iter) fail(ErrorCode::NotConverged, "aipw: iteration limit reached");
    mu = exp_map(m, mu, opt.step * grad);
  }
  res.estimate = mu;

  const Eigen::MatrixXd terms = terms_with(m, obs, mu, pis, outcome_at(mu));
  Mat lead = Mat::Zero(d, d);
  for (size_t i = 0; i < obs.size(); ++i) {
    if (obs[i].observed) lead -= dlog_base(m, mu, *obs[i].x) / pis[i];
  }
  lead /= static_cast<double>(obs.size());
  res.leading_matrix = lead;
  const Mat inv = checked_inverse(lead, ErrorCode::SingularMean);
  res.if_sample = {mu, terms * Eigen::MatrixXd(inv).transpose()};
  return res;
}

}  // namespace mfe
