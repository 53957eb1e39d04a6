#include "mfe/models/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "mfe/errors.hpp"
#include "mfe/geometry/ops.hpp"
#include "mfe/stats/linalg.hpp"
#include "mfe/stats/parallel.hpp"

namespace mfe {

namespace {

double log_sum_weights(const std::vector<QuadNode>& rule, double sigma,
                       const std::function<double(const Vec&)>& jac) {
  double z = 0.0;
  for (const QuadNode& q : rule) z += q.weight * std::exp(-q.v.squaredNorm() / (2 * sigma * sigma)) * jac(q.v);
  if (!(z > 0.0) || !std::isfinite(z)) fail(ErrorCode::QuadratureFail, "partition function is not finite");
  return std::log(z);
}

// Unit directions used to certify the acceptance bound.
std::vector<Vec> certification_directions(int dim, int count) {
  std::vector<Vec> dirs;
  if (dim == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else if (dim == 2) {
    for (int j = 0; j < count; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / count;
      Vec v(2);
      v << std::cos(phi), std::sin(phi);
      dirs.push_back(v);
    }
  } else {
    // Fibonacci lattice on S^2 lifted to the first three coordinates, plus
    // the coordinate axes for higher dimensions.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < count; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / count;
      const double rho = std::sqrt(1.0 - z * z);
      Vec v = Vec::Zero(dim);
      v[0] = rho * std::cos(golden * j);
      v[1] = rho * std::sin(golden * j);
      v[2] = z;
      dirs.push_back(v);
    }
    for (int k = 3; k < dim; ++k) dirs.push_back(Vec::Unit(dim, k));
  }
  return dirs;
}

}  // namespace

RiemannianGaussian::RiemannianGaussian(ManifoldPtr manifold, Vec center, double sigma)
    : manifold_(std::move(manifold)), center_(std::move(center)), sigma_(sigma) {
  if (!manifold_) fail(ErrorCode::InvalidArgument, "gaussian: null manifold");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) fail(ErrorCode::InvalidArgument, "gaussian: sigma must be positive");
  if (!manifold_->in_chart(center_)) fail(ErrorCode::OutOfChart, "gaussian: center outside chart");
  frame_ = manifold_->frame(center_);
  metric_ = manifold_->metric(center_);
  state_ = build_state();
}

RiemannianGaussian::RiemannianGaussian(ManifoldPtr manifold, Vec center, double sigma,
                                       std::shared_ptr<const State> state)
    : manifold_(std::move(manifold)), center_(std::move(center)), sigma_(sigma), state_(std::move(state)) {
  if (!manifold_->in_chart(center_)) fail(ErrorCode::OutOfChart, "gaussian: center outside chart");
  frame_ = manifold_->frame(center_);
  metric_ = manifold_->metric(center_);
}

RiemannianGaussian RiemannianGaussian::with_center(Vec center) const {
  if (manifold_->is_homogeneous()) return RiemannianGaussian(manifold_, std::move(center), sigma_, state_);
  return RiemannianGaussian(manifold_, std::move(center), sigma_);
}

double RiemannianGaussian::volume_density(const Vec& v) const {
  if (auto j = manifold_->normal_volume_density(center_, v)) return *j;
  return std::abs(dexp(*manifold_, center_, frame_ * v).determinant());
}

std::shared_ptr<const RiemannianGaussian::State> RiemannianGaussian::build_state() const {
  auto st = std::make_shared<State>();
  const int dim = manifold_->dim();
  const double c = (dim - 1) * std::sqrt(std::max(0.0, -manifold_->curvature_lower_bound()));
  st->radius = std::min(c * sigma_ * sigma_ + 7.0 * sigma_, manifold_->injectivity_safe_radius());
  auto jac = [this](const Vec& v) { return volume_density(v); };

  // Refine until two successive rules agree on log Z; keep the coarser one.
  const bool cheap = manifold_->normal_volume_density(center_, Vec::Zero(dim)).has_value();
  int panels = cheap ? 4 : 2, angular = cheap ? 32 : 16;
  std::vector<QuadNode> rule = ball_rule(dim, st->radius, panels, angular);
  double log_z = log_sum_weights(rule, sigma_, jac);
  for (int level = 0;; ++level) {
    if (level == (cheap ? 4 : 2)) fail(ErrorCode::QuadratureFail, "partition function did not converge");
    std::vector<QuadNode> finer = ball_rule(dim, st->radius, 2 * panels, 2 * angular);
    const double next = log_sum_weights(finer, sigma_, jac);
    const bool done = std::abs(next - log_z) < (cheap ? 1e-12 : 1e-8);
    if (done) break;
    rule = std::move(finer);
    log_z = next;
    panels *= 2;
    angular *= 2;
  }
  st->log_z = log_z;
  for (QuadNode& q : rule) {
    q.weight *= std::exp(-q.v.squaredNorm() / (2 * sigma_ * sigma_) - log_z) * jac(q.v);
  }
  st->nodes = std::move(rule);

  // Certify sup J on the ball over a radius x direction grid.
  const int ndir = dim == 2 ? (cheap ? 72 : 16) : (cheap ? 200 : 24);
  const int nrad = cheap ? 64 : 16;
  double jmax = 0.0, jmin = std::numeric_limits<double>::infinity();
  for (const Vec& dir : certification_directions(dim, ndir)) {
    for (int k = 0; k <= nrad; ++k) {
      const double j = jac(dir * (st->radius * k / nrad));
      jmax = std::max(jmax, j);
      jmin = std::min(jmin, j);
    }
  }
  st->j_max = jmax > jmin ? 1.02 * jmax : jmax;
  return st;
}

double RiemannianGaussian::log_density(const Vec& x) const {
  const double d = distance(*manifold_, center_, x);
  return -state_->log_z - d * d / (2.0 * sigma_ * sigma_);
}

Vec RiemannianGaussian::score(const Vec& x) const {
  return log_map(*manifold_, center_, x) / (sigma_ * sigma_);
}

Vec RiemannianGaussian::score_frame(const Vec& x) const {
  return frame_.transpose() * (metric_ * log_map(*manifold_, center_, x)) / (sigma_ * sigma_);
}

Vec RiemannianGaussian::sample_normal_coords(Rng& rng) const {
  const int dim = manifold_->dim();
  const double r2 = state_->radius * state_->radius;
  for (;;) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = sigma_ * rng.normal();
    if (v.squaredNorm() > r2) continue;
    const double j = volume_density(v);
    if (j > state_->j_max) {
      fail(ErrorCode::ProposalUnbounded, "gaussian sampler: volume density exceeds certified bound");
    }
    if (rng.uniform() * state_->j_max < j) return v;
  }
}

void RiemannianGaussian::sample_into(Rng& rng, int n, std::vector<Vec>& out) const {
  out.reserve(out.size() + static_cast<size_t>(std::max(0, n)));
  for (int i = 0; i < n; ++i) out.push_back(exp_map(*manifold_, center_, frame_ * sample_normal_coords(rng)));
}

std::vector<Vec> RiemannianGaussian::sample(int n, std::uint64_t seed) const {
  if (n < 1) fail(ErrorCode::InvalidArgument, "sample: n must be >= 1");
  Rng rng(stream_seed(seed, {0x5a3b1e}));
  std::vector<Vec> out;
  sample_into(rng, n, out);
  return out;
}

// ------------------------------------------------------------------ Fisher

namespace {

FisherInfo finish(const Vec& base, Mat g) {
  FisherInfo f{base, symmetrize(g), false};
  f.singular = min_eigenvalue(f.matrix) < 1e-8;
  return f;
}

}  // namespace

FisherInfo fisher_information(const RiemannianGaussian& model, const FisherOptions& opt) {
  const int d = model.manifold().dim();
  const double s4 = std::pow(model.sigma(), 4);
  Mat g = Mat::Zero(d, d);
  if (opt.mode == FisherMode::Quadrature) {
    // The score at x = exp(mu, E v) is v / sigma^2 in frame coordinates.
    for (const QuadNode& q : model.expectation_nodes()) g += q.weight * q.v * q.v.transpose() / s4;
  } else {
    for (const Vec& x : model.sample(opt.n, opt.seed)) {
      const Vec s = model.score_frame(x);
      g += s * s.transpose();
    }
    g /= opt.n;
  }
  return finish(model.center(), g);
}

FisherInfo fisher_information_hessian(const RiemannianGaussian& model, const FisherOptions& opt) {
  const Manifold& m = model.manifold();
  const int d = m.dim();
  const double s2 = model.sigma() * model.sigma();
  const Mat e = m.frame(model.center());
  Mat g = Mat::Zero(d, d);
  if (opt.mode == FisherMode::Quadrature) {
    for (const QuadNode& q : model.expectation_nodes()) {
      const Vec x = exp_map(m, model.center(), e * q.v);
      g -= q.weight * dlog_base(m, model.center(), x) / s2;
    }
  } else {
    for (const Vec& x : model.sample(opt.n, opt.seed)) g -= dlog_base(m, model.center(), x);
    g /= opt.n * s2;
  }
  return finish(model.center(), g);
}

// --------------------------------------------------------------------- DQM

DqmResult dqm_residual(const RiemannianGaussian& family, const Vec& theta, const Vec& h,
                       const std::vector<double>& t_seq) {
  const RiemannianGaussian at = family.with_center(theta);
  const Manifold& m = at.manifold();
  const Mat e = m.frame(theta);
  const Vec hf = to_frame(m, theta, h);
  const double s2 = at.sigma() * at.sigma();
  DqmResult out;
  out.t = t_seq;
  for (double t : t_seq) {
    const Vec moved = exp_map(m, theta, t * h);
    const RiemannianGaussian pt = at.with_center(moved);
    const double dz = pt.log_partition() - at.log_partition();
    double acc = 0.0;
    for (const QuadNode& q : at.expectation_nodes()) {
      const Vec x = exp_map(m, theta, e * q.v);
      const double d0 = std::pow(distance(m, theta, x), 2);
      const double dt = std::pow(distance(m, moved, x), 2);
      const double half_log_ratio = 0.5 * (-(dt - d0) / (2.0 * s2) - dz);
      const double lin = 0.5 * t * q.v.dot(hf) / s2;
      const double r = std::expm1(half_log_ratio) - lin;
      acc += q.weight * r * r;
    }
    if (!std::isfinite(acc)) fail(ErrorCode::QuadratureFail, "dqm residual is not finite");
    out.residuals.push_back(acc);
  }
  const bool nonzero = std::all_of(out.residuals.begin(), out.residuals.end(), [](double r) { return r > 0.0; });
  if (nonzero && t_seq.size() >= 2) {
    Eigen::VectorXd tv(static_cast<long>(t_seq.size())), rv(static_cast<long>(t_seq.size()));
    for (size_t i = 0; i < t_seq.size(); ++i) {
      tv[static_cast<long>(i)] = t_seq[i];
      rv[static_cast<long>(i)] = out.residuals[i];
    }
    out.slope = loglog_slope(tv, rv);
  }
  return out;
}

// --------------------------------------------------------------------- LAN

LanStatistics lan_statistics(const RiemannianGaussian& family, const Vec& theta, const Vec& h,
                             int n, int reps, std::uint64_t seed, int workers) {
  if (n < 1 || reps < 1) fail(ErrorCode::InvalidArgument, "lan: n and reps must be positive");
  const RiemannianGaussian at = family.with_center(theta);
  const Manifold& m = at.manifold();
  const double rn = std::sqrt(static_cast<double>(n));
  const Vec alt = exp_map(m, theta, h / rn);
  const double dz = at.with_center(alt).log_partition() - at.log_partition();
  const Vec hf = to_frame(m, theta, h) / rn;
  const double s2 = at.sigma() * at.sigma();
  const Mat e = m.frame(theta);

  LanStatistics out;
  out.log_lr.assign(static_cast<size_t>(reps), 0.0);
  out.linear_term.assign(static_cast<size_t>(reps), 0.0);
  parallel_for(reps, workers, [&](int r) {
    Rng rng(stream_seed(seed, {0x1a4, static_cast<std::uint64_t>(r)}));
    double llr = 0.0, lin = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec x = exp_map(m, theta, e * at.sample_normal_coords(rng));
      const double d0 = std::pow(distance(m, theta, x), 2);
      const double d1 = std::pow(distance(m, alt, x), 2);
      llr += (d0 - d1) / (2.0 * s2) - dz;
      lin += at.score_frame(x).dot(hf);
    }
    out.log_lr[static_cast<size_t>(r)] = llr;
    out.linear_term[static_cast<size_t>(r)] = lin;
  });
  double s = 0.0, ss = 0.0, sl = 0.0;
  for (int r = 0; r < reps; ++r) {
    s += out.log_lr[static_cast<size_t>(r)];
    sl += out.linear_term[static_cast<size_t>(r)];
  }
  out.mean_log_lr = s / reps;
  out.mean_linear_term = sl / reps;
  for (int r = 0; r < reps; ++r) ss += std::pow(out.log_lr[static_cast<size_t>(r)] - out.mean_log_lr, 2);
  out.var_log_lr = reps > 1 ? ss / (reps - 1) : 0.0;
  return out;
}

}  // namespace mfe
