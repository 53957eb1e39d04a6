#include "mfe/estimators/frechet.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mfe/geometry/ops.hpp"
#include "mfe/stats/parallel.hpp"

namespace mfe {

Eigen::VectorXd InfluenceSample::column_means() const { return rows.colwise().mean().transpose(); }

Eigen::MatrixXd InfluenceSample::covariance() const {
  const Eigen::MatrixXd c = rows.rowwise() - rows.colwise().mean();
  return c.transpose() * c / std::max<double>(1.0, static_cast<double>(rows.rows()) - 1.0);
}

Mat checked_inverse(const Mat& a, ErrorCode code) {
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s[0] > 0.0) || s[s.size() - 1] < 1e-12 * s[0]) {
    fail(code, "matrix is numerically singular");
  }
  return a.inverse();
}

namespace {

void check_convex_ball(const Manifold& m, const std::vector<Vec>& sample) {
  if (m.is_hadamard()) return;
  const double diam = m.convex_diameter();
  if (!std::isfinite(diam)) return;
  // All points within diam/2 of one of them bounds every pairwise distance
  // by the triangle inequality; fall back to the exact check otherwise.
  double r = 0.0;
  for (const Vec& x : sample) r = std::max(r, distance(m, sample.front(), x));
  if (2.0 * r < diam) return;
  for (size_t i = 0; i < sample.size(); ++i)
    for (size_t j = i + 1; j < sample.size(); ++j)
      if (distance(m, sample[i], sample[j]) >= diam) {
        fail(ErrorCode::NonConvexRegion, m.name() + ": sample is not inside a convex ball");
      }
}

}  // namespace

FrechetResult frechet_mean(const Manifold& m, const std::vector<Vec>& sample, const FrechetOptions& opt) {
  if (sample.empty()) fail(ErrorCode::InvalidArgument, "frechet_mean: empty sample");
  check_convex_ball(m, sample);
  FrechetResult res;
  Vec mu = sample.front();
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (int it = 1;; ++it) {
    Vec grad = Vec::Zero(m.chart_dim());
    for (const Vec& x : sample) grad += log_map(m, mu, x);
    grad *= inv_n;
    res.iterations = it;
    res.final_grad_norm = norm(m, mu, grad);
    if (res.final_grad_norm < opt.tol) break;
    if (it >= opt.max_iter) fail(ErrorCode::NotConverged, "frechet_mean: iteration limit reached");
    mu = exp_map(m, mu, opt.step * grad);
  }
  res.estimate = mu;
  res.degenerate = std::all_of(sample.begin(), sample.end(), [&](const Vec& x) { return x == sample.front(); });
  if (opt.compute_influence) {
    const int d = m.dim();
    if (res.degenerate) {
      res.influence_matrix = Mat::Identity(d, d);
      res.per_obs_if = {mu, Eigen::MatrixXd::Zero(static_cast<long>(sample.size()), d)};
    } else {
      Mat a;
      res.per_obs_if = influence_frechet(m, sample, mu, InfluenceMode::Jacobian, &a, opt.workers);
      res.influence_matrix = checked_inverse(a, ErrorCode::SingularMean);
    }
  }
  return res;
}

Vec hodges_from_mean(const Manifold& m, const Vec& mean, const Vec& reference, int n) {
  const double threshold = std::pow(static_cast<double>(n), -0.25);
  return distance(m, mean, reference) > threshold ? mean : reference;
}

Vec hodges(const Manifold& m, const std::vector<Vec>& sample, const Vec& reference,
           const FrechetOptions& opt) {
  const FrechetResult r = frechet_mean(m, sample, opt);
  return hodges_from_mean(m, r.estimate, reference, static_cast<int>(sample.size()));
}

InfluenceSample influence_frechet(const Manifold& m, const std::vector<Vec>& sample, const Vec& mu0,
                                  InfluenceMode mode, Mat* matrix_out, int workers) {
  if (sample.empty()) fail(ErrorCode::InvalidArgument, "influence_frechet: empty sample");
  const int d = m.dim();
  const long n = static_cast<long>(sample.size());
  for (const Vec& x : sample) {
    if (m.in_cut_locus(mu0, x)) fail(ErrorCode::CutLocus, "influence_frechet: observation in cut locus");
  }

  Eigen::MatrixXd logs(n, d);
  // Fixed-size chunks summed in order keep the result independent of the
  // worker count.
  constexpr long kChunk = 1024;
  const int chunks = static_cast<int>((n + kChunk - 1) / kChunk);
  std::vector<Mat> partial(static_cast<size_t>(chunks), Mat::Zero(d, d));
  parallel_for(chunks, workers, [&](int c) {
    const long lo = c * kChunk, hi = std::min(n, lo + kChunk);
    Mat acc = Mat::Zero(d, d);
    for (long i = lo; i < hi; ++i) {
      const Vec& x = sample[static_cast<size_t>(i)];
      const Vec v = to_frame(m, mu0, log_map(m, mu0, x));
      logs.row(i) = v.transpose();
      if (mode == InfluenceMode::Jacobian) {
        acc -= dlog_base(m, mu0, x);
      } else {
        acc += v * v.transpose();
      }
    }
    partial[static_cast<size_t>(c)] = acc;
  });
  Mat total = Mat::Zero(d, d);
  for (const Mat& p : partial) total += p;
  total /= static_cast<double>(n);

  Mat a = mode == InfluenceMode::Jacobian
              ? total
              : Mat(Mat::Identity(d, d) - curvature_of_covariance(m, mu0, 0.5 * (total + total.transpose())) / 3.0);
  if (matrix_out) *matrix_out = a;
  const Mat inv = checked_inverse(a, ErrorCode::SingularMean);
  InfluenceSample out{mu0, Eigen::MatrixXd(n, d)};
  const Eigen::MatrixXd inv_t = Eigen::MatrixXd(inv).transpose();
  out.rows = logs * inv_t;
  return out;
}

}  // namespace mfe
