#pragma once

#include <vector>

#include "mfe/geometry/manifold.hpp"
#include "mfe/geometry/ode.hpp"
#include "mfe/types.hpp"

namespace mfe {

/// Which implementation an operation should use. `Auto` takes the closed form
/// when the manifold has one; `Generic` forces the ODE / shooting pipeline.
enum class Path { Auto, Generic };

struct GeometryOptions {
  Path path = Path::Auto;
  OdeOptions ode{};
  int shooting_max_iter = 100;
  double shooting_tol = 1e-10;
};

// ------------------------------------------------------------ basic algebra

double inner(const Manifold& m, const Vec& x, const Vec& u, const Vec& v);
double norm(const Manifold& m, const Vec& x, const Vec& v);

/// Chart components -> coordinates in the orthonormal frame at x, and back.
Vec to_frame(const Manifold& m, const Vec& x, const Vec& v);
Vec from_frame(const Manifold& m, const Vec& x, const Vec& c);

// -------------------------------------------------------------- connection

/// Checked Christoffel symbols. Throws OutOfChart / SingularMetric.
Christoffel christoffel(const Manifold& m, const Vec& x);

struct GeodesicEnd {
  Vec point;
  Vec velocity;
};

/// Integrates c'' + Gamma(c', c') = 0 from (x, v) over [0, t].
/// Throws ChartExit if the trajectory leaves the chart.
GeodesicEnd geodesic_flow(const Manifold& m, const Vec& x, const Vec& v, double t,
                          const OdeOptions& ode = {});

Vec geodesic_solve(const Manifold& m, const Vec& x, const Vec& v, double t,
                   const OdeOptions& ode = {});

Vec exp_map(const Manifold& m, const Vec& x, const Vec& v, const GeometryOptions& opt = {});
Vec log_map(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt = {});
double distance(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt = {});

/// Damped Gauss-Newton on v -> exp(x, v) - y in frame coordinates.
Vec log_shooting(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt = {});

/// Transport of v from T_x to T_y along the minimizing geodesic.
Vec parallel_transport(const Manifold& m, const Vec& x, const Vec& y, const Vec& v,
                       const GeometryOptions& opt = {});

/// Transport of v along t -> exp(x, t w), t in [0, 1], by the transport ODE.
Vec transport_along(const Manifold& m, const Vec& x, const Vec& w, const Vec& v,
                    const OdeOptions& ode = {});

Point exp_map(const Manifold& m, const Tangent& v, const GeometryOptions& opt = {});
Tangent log_map(const Manifold& m, const Point& x, const Point& y,
                const GeometryOptions& opt = {});
Tangent parallel_transport(const Manifold& m, const Tangent& v, const Point& y,
                           const GeometryOptions& opt = {});

// --------------------------------------------------------------- curvature

/// R(u, v) w from the coordinate formula with finite-difference derivatives
/// of the Christoffel symbols.
Vec curvature_tensor(const Manifold& m, const Vec& x, const Vec& u, const Vec& v, const Vec& w);

/// <R(v,u)u, v> / |u ^ v|^2. Throws DegeneratePlane for (near) parallel u, v.
double sectional_curvature(const Manifold& m, const Vec& x, const Vec& u, const Vec& v);

/// Coefficients a_{ij,kl} of the second-order Taylor expansion of the metric
/// in normal coordinates at `base`: g_ij(theta) = delta_ij + sum a_{ij,kl}
/// theta^k theta^l + O(|theta|^3). Indices refer to the orthonormal frame.
class CurvatureOperator {
 public:
  CurvatureOperator(Vec base, int dim, std::vector<double> coeffs);

  const Vec& base() const { return base_; }
  int dim() const { return dim_; }
  double operator()(int i, int j, int k, int l) const {
    return coeffs_[static_cast<size_t>(((i * dim_ + j) * dim_ + k) * dim_ + l)];
  }

  /// R(C)_ij = -3 sum_kl a_{ij,kl} C_kl, for C in frame coordinates.
  Mat apply(const Mat& c) const;

  /// max |a_{ij,kl} + a_{ik,jl} + a_{il,jk}|.
  double bianchi_residual() const;
  /// max deviation from the pair symmetries a_{ij,kl} = a_{ji,kl} = a_{ij,lk} = a_{kl,ij}.
  double symmetry_residual() const;

 private:
  Vec base_;
  int dim_;
  std::vector<double> coeffs_;
};

/// Numerical normal coordinates: pulls the metric back through
/// theta -> exp(x, E theta) and differentiates twice.
CurvatureOperator normal_coefficients(const Manifold& m, const Vec& x);

/// Same coefficients assembled from the curvature tensor:
/// a_{ij,kl} = -(R_{kijl} + R_{lijk}) / 6 with R_{abcd} = <R(e_a, e_b) e_c, e_d>.
CurvatureOperator tensor_coefficients(const Manifold& m, const Vec& x);

/// R(C) at x for a frame-coordinate covariance C. Throws NotPSD and
/// DimensionMismatch.
Mat curvature_of_covariance(const Manifold& m, const Vec& x, const Mat& c);
Mat curvature_of_covariance(const CurvatureOperator& a, const Mat& c);

// ------------------------------------------------------ first derivatives
//
// All matrices below act on orthonormal-frame coordinates at x.

/// Pi_{exp(x,h) -> x} o d/de exp(x, h + e E w). `h` is in chart components.
Mat dexp(const Manifold& m, const Vec& x, const Vec& h, const GeometryOptions& opt = {});

/// Derivative of y -> log(x, y), pulled back to T_x by transport:
/// A w = d/de log(x, exp(y, e Pi_{x->y} E w)).
Mat dlog(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt = {});

/// Covariant derivative of the base point x -> log(x, y):
/// D w = d/de Pi_{gamma(e) -> x} log(gamma(e), y), gamma(e) = exp(x, e E w).
/// -D is the Riemannian Hessian of d(., y)^2 / 2 at x.
Mat dlog_base(const Manifold& m, const Vec& x, const Vec& y, const GeometryOptions& opt = {});

/// Frame-coordinate matrix of w -> R(h, E w) h, the Jacobi-series term.
Mat jacobi_operator(const Manifold& m, const Vec& x, const Vec& h);

}  // namespace mfe
