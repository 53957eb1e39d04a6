#include "mfe/geometry/manifold.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "mfe/errors.hpp"

namespace mfe {

bool Manifold::in_chart(const Vec& x) const { return x.size() == chart_dim() && x.allFinite(); }

bool Manifold::in_cut_locus(const Vec&, const Vec&) const { return false; }

Vec Manifold::project(const Vec&, const Vec& v) const { return v; }

Mat Manifold::frame(const Vec& x) const {
  const Mat g = metric(x);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    fail(ErrorCode::SingularMetric, name() + ": metric is not positive definite");
  }
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

Christoffel Manifold::christoffel(const Vec& x) const {
  if (!in_chart(x)) fail(ErrorCode::OutOfChart, name() + ": point outside chart domain");
  const int n = chart_dim();
  const double h = 1e-5 * (1.0 + x.norm());

  // dg[l](j, k) = d g_{jk} / d x^l
  std::vector<Mat> dg(static_cast<size_t>(n));
  for (int l = 0; l < n; ++l) {
    Vec xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    if (!in_chart(xp) || !in_chart(xm)) {
      fail(ErrorCode::OutOfChart, name() + ": finite-difference stencil leaves the chart");
    }
    dg[static_cast<size_t>(l)] = (metric(xp) - metric(xm)) / (2.0 * h);
  }

  const Mat g = metric(x);
  Eigen::LDLT<Mat> ldlt(g);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().minCoeff() <= 1e-300) {
    fail(ErrorCode::SingularMetric, name() + ": metric is singular");
  }
  const Mat ginv = ldlt.solve(Mat::Identity(n, n));

  Christoffel gamma;
  gamma.upper.assign(static_cast<size_t>(n), Mat::Zero(n, n));
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // lowered[l] = 1/2 (g_{jl,k} + g_{kl,j} - g_{jk,l})
      Vec lowered(n);
      for (int l = 0; l < n; ++l) {
        lowered[l] = 0.5 * (dg[static_cast<size_t>(k)](j, l) + dg[static_cast<size_t>(j)](k, l) -
                            dg[static_cast<size_t>(l)](j, k));
      }
      const Vec raised = ginv * lowered;
      for (int i = 0; i < n; ++i) gamma.upper[static_cast<size_t>(i)](j, k) = raised[i];
    }
  }
  return gamma;
}

Vec Manifold::exp_closed(const Vec&, const Vec&) const {
  fail(ErrorCode::InvalidArgument, name() + ": no closed-form exponential map");
}
Vec Manifold::log_closed(const Vec&, const Vec&) const {
  fail(ErrorCode::InvalidArgument, name() + ": no closed-form logarithmic map");
}
Vec Manifold::transport_closed(const Vec&, const Vec&, const Vec&) const {
  fail(ErrorCode::InvalidArgument, name() + ": no closed-form parallel transport");
}
double Manifold::distance_closed(const Vec&, const Vec&) const {
  fail(ErrorCode::InvalidArgument, name() + ": no closed-form distance");
}
std::optional<double> Manifold::sectional_closed(const Vec&, const Vec&, const Vec&) const {
  return std::nullopt;
}
std::optional<double> Manifold::normal_volume_density(const Vec&, const Vec&) const {
  return std::nullopt;
}

}  // namespace mfe
