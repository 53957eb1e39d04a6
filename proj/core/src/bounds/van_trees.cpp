#include "mfe/bounds/van_trees.hpp"

#include <cmath>
#include <numbers>

#include "mfe/errors.hpp"
#include "mfe/geometry/ops.hpp"
#include "mfe/stats/linalg.hpp"
#include "mfe/stats/parallel.hpp"
#include "mfe/stats/tests.hpp"

namespace mfe {

namespace {

constexpr double kPi = std::numbers::pi;

void check_prior(const PriorSpec& prior) {
  if (prior.shape == PriorSpec::Shape::Uniform) {
    fail(ErrorCode::PriorNotSmooth, "prior density does not vanish at the boundary of its support");
  }
  if (!(prior.half_width > 0.0)) fail(ErrorCode::InvalidArgument, "prior half_width must be positive");
  if (prior.panels < 1) fail(ErrorCode::InvalidArgument, "prior panels must be positive");
}

// Orthogonal matrix taking frame coordinates at `from` to frame coordinates
// at `to` by parallel transport.
Mat transport_matrix(const Manifold& m, const Vec& from, const Vec& to) {
  const int d = m.dim();
  if (from == to) return Mat::Identity(d, d);
  Mat p(d, d);
  for (int k = 0; k < d; ++k) {
    const Vec e = Vec::Unit(d, k);
    p.col(k) = to_frame(m, to, parallel_transport(m, from, to, from_frame(m, from, e)));
  }
  return p;
}

}  // namespace

PriorQuadrature prior_quadrature(const PriorSpec& prior, int dim) {
  check_prior(prior);
  const double w = prior.half_width;
  const auto rule = gauss_legendre(-w, w, prior.panels);
  PriorQuadrature out;
  out.information = Mat::Zero(dim, dim);
  const size_t q = rule.size();
  std::vector<size_t> idx(static_cast<size_t>(dim), 0);
  for (;;) {
    Vec u(dim), s(dim);
    double weight = 1.0;
    for (int k = 0; k < dim; ++k) {
      const auto [x, wq] = rule[idx[static_cast<size_t>(k)]];
      const double c = std::cos(kPi * x / (2.0 * w));
      u[k] = x;
      weight *= wq * c * c / w;
      s[k] = -(kPi / w) * std::tan(kPi * x / (2.0 * w));
    }
    out.nodes.push_back({u, weight});
    out.mass += weight;
    out.information += weight * s * s.transpose();
    int k = 0;
    while (k < dim && ++idx[static_cast<size_t>(k)] == q) idx[static_cast<size_t>(k++)] = 0;
    if (k == dim) break;
  }
  if (std::abs(out.mass - 1.0) > 1e-6) fail(ErrorCode::QuadratureFail, "prior quadrature mass is not 1");
  return out;
}

Vec sample_prior(const PriorSpec& prior, int dim, Rng& rng) {
  check_prior(prior);
  Vec u(dim);
  for (int k = 0; k < dim; ++k) {
    for (;;) {
      const double x = rng.uniform(-prior.half_width, prior.half_width);
      const double c = std::cos(kPi * x / (2.0 * prior.half_width));
      if (rng.uniform() < c * c) {
        u[k] = x;
        break;
      }
    }
  }
  return u;
}

Mat van_trees_middle(const RiemannianGaussian& family, const PriorSpec& prior, int n, Mat* prior_info,
                     Mat* mean_info) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "van_trees: n must be positive");
  const Manifold& m = family.manifold();
  const int d = m.dim();
  if (prior.center.size() != m.chart_dim()) fail(ErrorCode::DimensionMismatch, "prior center dimension");
  if (prior.half_width * std::sqrt(static_cast<double>(d)) >= m.injectivity_safe_radius()) {
    fail(ErrorCode::QuadratureFail, "prior support exceeds the injectivity radius");
  }
  const PriorQuadrature pq = prior_quadrature(prior, d);
  const Vec& c0 = prior.center;
  Mat g_mean = Mat::Zero(d, d);
  for (const QuadNode& node : pq.nodes) {
    const Vec h = from_frame(m, c0, node.v);
    const Vec theta = exp_map(m, c0, h);
    const Mat g = fisher_information(family.with_center(theta)).matrix;
    const Mat p = transport_matrix(m, theta, c0);
    const Mat dx = node.v.squaredNorm() == 0.0 ? Mat(Mat::Identity(d, d)) : dexp(m, c0, h);
    g_mean += node.weight * dx.transpose() * p * g * p.transpose() * dx;
  }
  g_mean /= pq.mass;
  if (prior_info) *prior_info = pq.information;
  if (mean_info) *mean_info = g_mean;
  return sym_inverse(pq.information + static_cast<double>(n) * g_mean);
}

VanTreesReport van_trees_bound(const RiemannianGaussian& family, const PriorSpec& prior,
                               const EstimatorHook& estimator, int n, const VanTreesOptions& opt) {
  if (opt.draws < 2) fail(ErrorCode::InvalidArgument, "van_trees: need at least two draws");
  VanTreesReport out;
  const Mat middle = van_trees_middle(family, prior, n, &out.prior_information, &out.mean_information);
  const Manifold& m = family.manifold();
  const int d = m.dim();
  const Vec& c0 = prior.center;

  struct Draw {
    Mat risk;
    Mat outer;
  };
  std::vector<Draw> draws(static_cast<size_t>(opt.draws));
  parallel_for(opt.draws, opt.workers, [&](int j) {
    Rng rng(stream_seed(opt.seed, {0x7a11, static_cast<std::uint64_t>(j)}));
    const Vec u = sample_prior(prior, d, rng);
    const Vec h = from_frame(m, c0, u);
    const Vec theta = exp_map(m, c0, h);
    std::vector<Vec> data;
    data.reserve(static_cast<size_t>(n));
    family.with_center(theta).sample_into(rng, n, data);
    const Vec est = estimator(data);
    const Mat p = transport_matrix(m, theta, c0);
    const Mat dx = u.squaredNorm() == 0.0 ? Mat(Mat::Identity(d, d)) : dexp(m, c0, h);
    const Vec v = p * to_frame(m, theta, log_map(m, theta, est));
    draws[static_cast<size_t>(j)] = {v * v.transpose(), Mat(-p * dlog_base(m, theta, est) * p.transpose() * dx)};
  });

  Mat risk = Mat::Zero(d, d), outer = Mat::Zero(d, d);
  for (const Draw& dr : draws) {
    risk += dr.risk;
    outer += dr.outer;
  }
  risk /= static_cast<double>(opt.draws);
  outer /= static_cast<double>(opt.draws);
  out.outer_factor = outer;

  BoundReport& r = out.report;
  r.label = "van_trees";
  r.n = n;
  r.bound_matrix = symmetrize(outer * middle * outer.transpose());
  r.empirical_cov = symmetrize(risk);
  r.gap_min_eig = psd_gap(r.empirical_cov, r.bound_matrix);
  const double se = bootstrap_se(opt.draws, opt.bootstrap, stream_seed(opt.seed, {0x7a12}), [&](const std::vector<int>& idx) {
    Mat acc = Mat::Zero(d, d);
    for (int i : idx) acc += draws[static_cast<size_t>(i)].risk;
    return psd_gap(acc / static_cast<double>(idx.size()), r.bound_matrix);
  });
  r.slack = opt.slack_se * se;
  r.pass = r.gap_min_eig >= -r.slack;
  return out;
}

}  // namespace mfe
