#include "mfe/geometry/ops.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mfe/errors.hpp"

namespace mfe {

namespace {

// Gamma^i(a, b) = sum_jk Gamma^i_{jk} a^j b^k.
Vec contract(const Christoffel& g, const Vec& a, const Vec& b) {
  const int n = g.dim();
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = a.dot(g.upper[static_cast<size_t>(i)] * b);
  return out;
}

void require_chart(const Manifold& m, const Vec& x) {
  if (!m.in_chart(x)) fail(ErrorCode::OutOfChart, m.name() + ": point outside chart domain");
}

// Christoffel symbols inside an ODE right-hand side: leaving the chart is a
// chart exit rather than a caller error.
Christoffel christoffel_on_path(const Manifold& m, const Vec& x) {
  if (!m.in_chart(x)) fail(ErrorCode::ChartExit, m.name() + ": trajectory left the chart");
  return m.christoffel(x);
}

// Fourth-order central difference of a vector-valued f at 0 with step s.
template <class F>
Vec central5(F&& f, double s) {
  return (-f(2.0 * s) + 8.0 * f(s) - 8.0 * f(-s) + f(-2.0 * s)) / (12.0 * s);
}

constexpr double kDerivStep = 1e-3;

}  // namespace

double inner(const Manifold& m, const Vec& x, const Vec& u, const Vec& v) {
  return u.dot(m.metric(x) * v);
}

double norm(const Manifold& m, const Vec& x, const Vec& v) {
  return std::sqrt(std::max(0.0, inner(m, x, v, v)));
}

Vec to_frame(const Manifold& m, const Vec& x, const Vec& v) {
  return m.frame(x).transpose() * (m.metric(x) * v);
}

Vec from_frame(const Manifold& m, const Vec& x, const Vec& c) { return m.frame(x) * c; }

Christoffel christoffel(const Manifold& m, const Vec& x) {
  require_chart(m, x);
  return m.christoffel(x);
}

GeodesicEnd geodesic_flow(const Manifold& m, const Vec& x, const Vec& v, double t,
                          const OdeOptions& ode) {
  require_chart(m, x);
  const int n = m.chart_dim();
  if (v.size() != n) fail(ErrorCode::DimensionMismatch, "geodesic: tangent has wrong size");
  OdeState y0(2 * n);
  y0 << x, v;
  auto rhs = [&](double, const OdeState& y) {
    const Vec c = y.head(n), dc = y.segment(n, n);
    OdeState dy(2 * n);
    dy << dc, -contract(christoffel_on_path(m, c), dc, dc);
    return dy;
  };
  auto observer = [&](double, const OdeState& y) { return m.in_chart(Vec(y.head(n))); };
  const OdeState y1 = integrate_dopri5(rhs, y0, 0.0, t, ode, observer);
  return {y1.head(n), y1.segment(n, n)};
}

Vec geodesic_solve(const Manifold& m, const Vec& x, const Vec& v, double t, const OdeOptions& ode) {
  return geodesic_flow(m, x, v, t, ode).point;
}

Vec exp_map(const Manifold& m, const Vec& x, const Vec& v, const GeometryOptions& opt) {
  require_chart(m, x);
  if (v.isZero(0.0)) return x;
  if (opt.path == Path::Auto && m.has_closed_forms()) return m.exp_closed(x, v);
  return geodesic_solve(m, x, v, 1.0, opt.ode);
}

Vec log_map(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt) {
  require_chart(m, x);
  require_chart(m, y);
  if (x == y) return Vec::Zero(m.chart_dim());
  if (m.in_cut_locus(x, y)) fail(ErrorCode::CutLocus, m.name() + ": point in the cut locus");
  if (opt.path == Path::Auto && m.has_closed_forms()) return m.log_closed(x, y);
  return log_shooting(m, x, y, opt);
}

double distance(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt) {
  if (opt.path == Path::Auto && m.has_closed_forms()) {
    require_chart(m, x);
    require_chart(m, y);
    return m.distance_closed(x, y);
  }
  return norm(m, x, log_map(m, x, y, opt));
}

Vec log_shooting(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt) {
  require_chart(m, x);
  require_chart(m, y);
  const Mat e = m.frame(x);
  const int d = m.dim();
  OdeOptions ode = opt.ode;
  ode.atol = std::min(ode.atol, 1e-12);
  ode.rtol = std::min(ode.rtol, 1e-12);

  auto residual = [&](const Vec& c, Vec& r) {
    try {
      r = geodesic_solve(m, x, e * c, 1.0, ode) - y;
      return true;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ChartExit) throw;
      return false;
    }
  };

  Vec c = e.transpose() * (m.metric(x) * (y - x));
  Vec r;
  if (!residual(c, r)) fail(ErrorCode::NoConvergence, "log shooting: initial guess leaves chart");
  double f = r.norm();
  for (int it = 0; it < opt.shooting_max_iter && f >= opt.shooting_tol; ++it) {
    Mat jac(m.chart_dim(), d);
    const double h = 1e-6 * std::max(1.0, c.norm());
    for (int k = 0; k < d; ++k) {
      Vec rp, rm;
      Vec cp = c, cm = c;
      cp[k] += h;
      cm[k] -= h;
      if (!residual(cp, rp) || !residual(cm, rm)) {
        fail(ErrorCode::NoConvergence, "log shooting: Jacobian stencil leaves chart");
      }
      jac.col(k) = (rp - rm) / (2.0 * h);
    }
    const Vec delta = jac.householderQr().solve(-r);
    double step = 1.0;
    for (;;) {
      Vec cand = c + step * delta, rc;
      if (residual(cand, rc) && rc.norm() <= (1.0 - 1e-4 * step) * f) {
        c = cand;
        r = rc;
        f = rc.norm();
        break;
      }
      step *= 0.5;
      if (step < 1e-10) fail(ErrorCode::NoConvergence, "log shooting: line search failed");
    }
  }
  if (!(f < opt.shooting_tol)) fail(ErrorCode::NoConvergence, "log shooting: iteration limit");
  return e * c;
}

Vec transport_along(const Manifold& m, const Vec& x, const Vec& w, const Vec& v,
                    const OdeOptions& ode) {
  require_chart(m, x);
  const int n = m.chart_dim();
  OdeState y0(3 * n);
  y0 << x, w, v;
  auto rhs = [&](double, const OdeState& y) {
    const Vec c = y.head(n), dc = y.segment(n, n), tv = y.segment(2 * n, n);
    const Christoffel g = christoffel_on_path(m, c);
    OdeState dy(3 * n);
    dy << dc, -contract(g, dc, dc), -contract(g, dc, tv);
    return dy;
  };
  auto observer = [&](double, const OdeState& y) { return m.in_chart(Vec(y.head(n))); };
  return integrate_dopri5(rhs, y0, 0.0, 1.0, ode, observer).segment(2 * n, n);
}

Vec parallel_transport(const Manifold& m, const Vec& x, const Vec& y, const Vec& v,
                       const GeometryOptions& opt) {
  require_chart(m, x);
  require_chart(m, y);
  if (x == y) return v;
  if (m.in_cut_locus(x, y)) fail(ErrorCode::CutLocus, m.name() + ": no unique geodesic");
  if (opt.path == Path::Auto && m.has_closed_forms()) return m.transport_closed(x, y, v);
  return transport_along(m, x, log_map(m, x, y, opt), v, opt.ode);
}

Point exp_map(const Manifold& m, const Tangent& v, const GeometryOptions& opt) {
  return {exp_map(m, v.base.coords, v.comps, opt)};
}

Tangent log_map(const Manifold& m, const Point& x, const Point& y, const GeometryOptions& opt) {
  return {x, log_map(m, x.coords, y.coords, opt)};
}

Tangent parallel_transport(const Manifold& m, const Tangent& v, const Point& y,
                           const GeometryOptions& opt) {
  return {y, parallel_transport(m, v.base.coords, y.coords, v.comps, opt)};
}

// ------------------------------------------------------------------ curvature

Vec curvature_tensor(const Manifold& m, const Vec& x, const Vec& u, const Vec& v, const Vec& w) {
  require_chart(m, x);
  const int n = m.chart_dim();
  const Christoffel g0 = m.christoffel(x);
  const double h = 1e-5 * (1.0 + x.norm());

  // Directional derivative of the symbols: (D_a Gamma)(b, c).
  auto derivative = [&](const Vec& a, const Vec& b, const Vec& c) -> Vec {
    const double an = a.norm();
    if (an == 0.0) return Vec::Zero(n);
    const Vec dir = a / an;
    const Christoffel gp = m.christoffel(x + h * dir);
    const Christoffel gm = m.christoffel(x - h * dir);
    return (contract(gp, b, c) - contract(gm, b, c)) * (an / (2.0 * h));
  };

  return derivative(u, v, w) - derivative(v, u, w) + contract(g0, u, contract(g0, v, w)) -
         contract(g0, v, contract(g0, u, w));
}

double sectional_curvature(const Manifold& m, const Vec& x, const Vec& u, const Vec& v) {
  const Vec pu = m.project(x, u), pv = m.project(x, v);
  const double uu = inner(m, x, pu, pu), vv = inner(m, x, pv, pv), uv = inner(m, x, pu, pv);
  const double area = uu * vv - uv * uv;
  if (!(area > 1e-12 * uu * vv) || area <= 0.0) {
    fail(ErrorCode::DegeneratePlane, "sectional curvature: vectors are (nearly) parallel");
  }
  return inner(m, x, curvature_tensor(m, x, pv, pu, pu), pv) / area;
}

CurvatureOperator::CurvatureOperator(Vec base, int dim, std::vector<double> coeffs)
    : base_(std::move(base)), dim_(dim), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<size_t>(dim * dim * dim * dim)) {
    fail(ErrorCode::DimensionMismatch, "curvature operator: wrong coefficient count");
  }
}

Mat CurvatureOperator::apply(const Mat& c) const {
  if (c.rows() != dim_ || c.cols() != dim_) {
    fail(ErrorCode::DimensionMismatch, "R(C): covariance has wrong shape");
  }
  Mat r = Mat::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l) r(i, j) -= 3.0 * (*this)(i, j, k, l) * c(k, l);
  return 0.5 * (r + r.transpose());
}

double CurvatureOperator::bianchi_residual() const {
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l) {
          const double s = (*this)(i, j, k, l) + (*this)(i, k, j, l) + (*this)(i, l, j, k);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

double CurvatureOperator::symmetry_residual() const {
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l) {
          const double a = (*this)(i, j, k, l);
          worst = std::max({worst, std::abs(a - (*this)(j, i, k, l)),
                            std::abs(a - (*this)(i, j, l, k)), std::abs(a - (*this)(k, l, i, j))});
        }
  return worst;
}

CurvatureOperator normal_coefficients(const Manifold& m, const Vec& x) {
  require_chart(m, x);
  const int d = m.dim();
  const Mat e = m.frame(x);
  GeometryOptions opt;
  opt.ode.atol = opt.ode.rtol = 1e-13;

  // Pulled-back metric d(theta) = Dphi^T G(phi) Dphi, phi(theta) = exp(x, E theta).
  auto pulled = [&](const Vec& theta) -> Mat {
    Mat dphi(m.chart_dim(), d);
    for (int k = 0; k < d; ++k) {
      dphi.col(k) = central5(
          [&](double s) { return exp_map(m, x, e * (theta + s * Vec::Unit(d, k)), opt); },
          kDerivStep);
    }
    const Vec p = exp_map(m, x, e * theta, opt);
    return dphi.transpose() * m.metric(p) * dphi;
  };

  // Second directional derivative of d along u at 0, Richardson-extrapolated
  // over steps s and s/2.
  const Mat d0 = pulled(Vec::Zero(d));
  auto second = [&](const Vec& u) -> Mat {
    auto diff = [&](double s) { return Mat((pulled(s * u) - 2.0 * d0 + pulled(-s * u)) / (s * s)); };
    constexpr double s = 0.05;
    return (4.0 * diff(s / 2.0) - diff(s)) / 3.0;
  };

  std::vector<Mat> hess(static_cast<size_t>(d * d));  // hess[k*d+l] = d^2 d / dtheta_k dtheta_l
  for (int k = 0; k < d; ++k) {
    hess[static_cast<size_t>(k * d + k)] = second(Vec::Unit(d, k));
  }
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      const Vec ek = Vec::Unit(d, k), el = Vec::Unit(d, l);
      const Mat mixed = (second(ek + el) - second(ek - el)) / 4.0;
      hess[static_cast<size_t>(k * d + l)] = mixed;
      hess[static_cast<size_t>(l * d + k)] = mixed;
    }
  }

  std::vector<double> coeffs(static_cast<size_t>(d * d * d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const Mat& h = hess[static_cast<size_t>(k * d + l)];
          coeffs[static_cast<size_t>(((i * d + j) * d + k) * d + l)] = 0.25 * (h(i, j) + h(j, i));
        }
  return CurvatureOperator(x, d, std::move(coeffs));
}

CurvatureOperator tensor_coefficients(const Manifold& m, const Vec& x) {
  require_chart(m, x);
  const int d = m.dim();
  const Mat e = m.frame(x);
  const Mat g = m.metric(x);
  // r[((a*d+b)*d+c)*d+f] = <R(e_a, e_b) e_c, e_f>
  std::vector<double> r(static_cast<size_t>(d * d * d * d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        const Vec rv = g * curvature_tensor(m, x, e.col(a), e.col(b), e.col(c));
        for (int f = 0; f < d; ++f) r[static_cast<size_t>(((a * d + b) * d + c) * d + f)] = e.col(f).dot(rv);
      }
  auto R = [&](int a, int b, int c, int f) { return r[static_cast<size_t>(((a * d + b) * d + c) * d + f)]; };
  std::vector<double> coeffs(r.size());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          coeffs[static_cast<size_t>(((i * d + j) * d + k) * d + l)] =
              -(R(k, i, j, l) + R(l, i, j, k)) / 6.0;
  return CurvatureOperator(x, d, std::move(coeffs));
}

Mat curvature_of_covariance(const CurvatureOperator& a, const Mat& c) {
  if (c.rows() != a.dim() || c.cols() != a.dim()) {
    fail(ErrorCode::DimensionMismatch, "R(C): covariance has wrong shape");
  }
  const Mat s = 0.5 * (c + c.transpose());
  if ((c - c.transpose()).norm() > 1e-9 * (1.0 + c.norm())) {
    fail(ErrorCode::NotPSD, "R(C): covariance is not symmetric");
  }
  if (c.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff())) {
      fail(ErrorCode::NotPSD, "R(C): covariance is not positive semi-definite");
    }
  }
  return a.apply(s);
}

Mat curvature_of_covariance(const Manifold& m, const Vec& x, const Mat& c) {
  if (c.rows() != m.dim() || c.cols() != m.dim()) {
    fail(ErrorCode::DimensionMismatch, "R(C): covariance has wrong shape");
  }
  return curvature_of_covariance(normal_coefficients(m, x), c);
}

// -------------------------------------------------------------- derivatives

Mat dexp(const Manifold& m, const Vec& x, const Vec& h, const GeometryOptions& opt) {
  const int d = m.dim();
  const Mat e = m.frame(x);
  const Vec y = exp_map(m, x, h, opt);
  Mat out(d, d);
  for (int k = 0; k < d; ++k) {
    const Vec dir = e.col(k);
    const Vec dy = central5([&](double s) { return exp_map(m, x, h + s * dir, opt); }, kDerivStep);
    out.col(k) = to_frame(m, x, parallel_transport(m, y, x, m.project(y, dy), opt));
  }
  return out;
}

Mat dlog(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt) {
  const int d = m.dim();
  const Mat e = m.frame(x);
  Mat out(d, d);
  for (int k = 0; k < d; ++k) {
    const Vec u = parallel_transport(m, x, y, e.col(k), opt);
    const Vec dv = central5(
        [&](double s) { return log_map(m, x, exp_map(m, y, s * u, opt), opt); }, kDerivStep);
    out.col(k) = to_frame(m, x, dv);
  }
  return out;
}

Mat dlog_base(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt) {
  const int d = m.dim();
  const Mat e = m.frame(x);
  Mat out(d, d);
  for (int k = 0; k < d; ++k) {
    const Vec dir = e.col(k);
    const Vec dv = central5(
        [&](double s) {
          const Vec g = exp_map(m, x, s * dir, opt);
          return parallel_transport(m, g, x, log_map(m, g, y, opt), opt);
        },
        kDerivStep);
    out.col(k) = to_frame(m, x, dv);
  }
  return out;
}

Mat jacobi_operator(const Manifold& m, const Vec& x, const Vec& h) {
  const int d = m.dim();
  const Mat e = m.frame(x);
  Mat out(d, d);
  for (int k = 0; k < d; ++k) out.col(k) = to_frame(m, x, curvature_tensor(m, x, h, e.col(k), h));
  return out;
}

}  // namespace mfe
