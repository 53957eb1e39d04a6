#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mfe/errors.hpp"
#include "mfe/geometry/builtin.hpp"
#include "mfe/geometry/check.hpp"
#include "mfe/geometry/ops.hpp"

using namespace mfe;
using std::numbers::pi;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

// Half-plane metric without the closed-form overrides, so christoffel() goes
// through the finite-difference default.
class PlainHalfPlane final : public Manifold {
 public:
  std::string name() const override { return "plain_half_plane"; }
  int dim() const override { return 2; }
  Mat metric(const Vec& x) const override { return Mat::Identity(2, 2) / (x[1] * x[1]); }
  bool in_chart(const Vec& x) const override { return x[1] > 0; }
};

template <class F>
void expect_error(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Christoffel, EuclideanIsZero) {
  Euclidean e(3);
  const Christoffel g = christoffel(e, v3(0.3, -2.0, 5.0));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(g.upper[i].norm(), 0.0);
}

TEST(Christoffel, HalfPlaneFiniteDifferencesMatchHandSymbols) {
  PlainHalfPlane hp;
  const double y = 1.7;
  const Christoffel g = christoffel(hp, v2(0.4, y));
  // Gamma^x_{xy} = -1/y, Gamma^y_{xx} = 1/y, Gamma^y_{yy} = -1/y.
  EXPECT_NEAR(g(0, 0, 1), -1 / y, 1e-8);
  EXPECT_NEAR(g(0, 1, 0), -1 / y, 1e-8);
  EXPECT_NEAR(g(1, 0, 0), 1 / y, 1e-8);
  EXPECT_NEAR(g(1, 1, 1), -1 / y, 1e-8);
  EXPECT_NEAR(g(0, 0, 0), 0, 1e-8);
  EXPECT_NEAR(g(1, 0, 1), 0, 1e-8);

  HyperbolicPlane h;
  const Christoffel closed = christoffel(h, v2(0.4, y));
  for (int i = 0; i < 2; ++i) EXPECT_LT((closed.upper[i] - g.upper[i]).norm(), 1e-8);
}

TEST(Christoffel, PolarSphereTextbookSymbols) {
  SpherePolar s;
  const double th = 1.1;
  const Christoffel g = christoffel(s, v2(th, 0.3));
  EXPECT_NEAR(g(0, 1, 1), -std::sin(th) * std::cos(th), 1e-8);
  EXPECT_NEAR(g(1, 0, 1), std::cos(th) / std::sin(th), 1e-8);
  EXPECT_NEAR(g(1, 1, 0), std::cos(th) / std::sin(th), 1e-8);
  EXPECT_NEAR(g(0, 0, 0), 0, 1e-8);
  EXPECT_NEAR(g(1, 1, 1), 0, 1e-8);
}

TEST(Christoffel, Errors) {
  HyperbolicPlane h;
  expect_error(ErrorCode::OutOfChart, [&] { christoffel(h, v2(0, -1)); });
}

TEST(Geodesic, EuclideanStraightLine) {
  Euclidean e(2);
  const Vec c = geodesic_solve(e, v2(0, 0), v2(1, 2), 1.0);
  EXPECT_NEAR(c[0], 1, 1e-12);
  EXPECT_NEAR(c[1], 2, 1e-12);
}

TEST(Geodesic, SphereQuarterCircle) {
  Sphere s;
  const Vec c = geodesic_solve(s, v3(1, 0, 0), v3(0, pi / 2, 0), 1.0);
  EXPECT_LT((c - v3(0, 1, 0)).norm(), 1e-8);
}

TEST(Geodesic, SpeedConserved) {
  CheckOptions opt;
  opt.cases = 10;
  for (const auto& name : {"sphere", "hyperbolic", "spd2", "sphere_polar"}) {
    EXPECT_LT(speed_drift(*make_manifold(name), opt), 1e-8) << name;
  }
}

TEST(Geodesic, ChartExitThroughPole) {
  SpherePolar s;
  expect_error(ErrorCode::ChartExit, [&] { geodesic_solve(s, v2(pi / 2, 0), v2(2.0, 0), 1.0); });
}

TEST(ExpMap, ZeroVectorIsIdentity) {
  for (const auto& name : builtin_manifold_names()) {
    const auto m = make_manifold(name);
    const Vec x = m->reference_point();
    EXPECT_EQ(exp_map(*m, x, Vec::Zero(m->chart_dim())), x) << name;
  }
}

TEST(ExpMap, HemisphereClosedForm) {
  Sphere s;
  const Vec beta = v3(0.6, 0.0, 0.8);
  const Vec h = v3(0.8, 0.5, -0.6);  // orthogonal to beta
  ASSERT_NEAR(beta.dot(h), 0, 1e-15);
  for (double t : {0.1, 0.7, 1.3}) {
    const double r = t * h.norm();
    const Vec expected = std::cos(r) * beta + std::sin(r) * h / h.norm();
    EXPECT_LT((exp_map(s, beta, t * h) - expected).norm(), 1e-14);
    GeometryOptions generic;
    generic.path = Path::Generic;
    EXPECT_LT((exp_map(s, beta, t * h, generic) - expected).norm(), 1e-8);
  }
}

TEST(ExpMap, Spd2DiagonalIsMatrixExponential) {
  Spd2 p;
  const Vec id = v3(1, 0, 1);
  const double a = 0.7, b = -0.4;
  const Vec expected = v3(std::exp(a), 0, std::exp(b));
  EXPECT_LT((exp_map(p, id, v3(a, 0, b)) - expected).norm(), 1e-12);
  GeometryOptions generic;
  generic.path = Path::Generic;
  EXPECT_LT((exp_map(p, id, v3(a, 0, b), generic) - expected).norm(), 1e-8);
}

TEST(LogMap, BasicCases) {
  Euclidean e(2);
  EXPECT_LT((log_map(e, v2(1, 2), v2(-3, 0.5)) - v2(-4, -1.5)).norm(), 1e-15);

  HyperbolicPlane h;
  EXPECT_EQ(log_map(h, v2(0.3, 2), v2(0.3, 2)).norm(), 0.0);

  Sphere s;
  const Vec l = log_map(s, v3(1, 0, 0), v3(0, 0, 1));
  EXPECT_LT((l - v3(0, 0, pi / 2)).norm(), 1e-14);
  GeometryOptions generic;
  generic.path = Path::Generic;
  EXPECT_LT((log_map(s, v3(1, 0, 0), v3(0, 0, 1), generic) - v3(0, 0, pi / 2)).norm(), 1e-8);
}

TEST(LogMap, NormIsDistance) {
  HyperbolicPlane h;
  const Vec x = v2(0.2, 0.5), y = v2(-1.0, 2.5);
  // Half-plane distance: arccosh(1 + |x-y|^2 / (2 y1 y2)).
  const double d = std::acosh(1 + (x - y).squaredNorm() / (2 * x[1] * y[1]));
  EXPECT_NEAR(norm(h, x, log_map(h, x, y)), d, 1e-12);
  GeometryOptions generic;
  generic.path = Path::Generic;
  EXPECT_NEAR(norm(h, x, log_map(h, x, y, generic)), d, 1e-8);
}

TEST(LogMap, CutLocus) {
  Sphere s;
  expect_error(ErrorCode::CutLocus, [&] { log_map(s, v3(1, 0, 0), v3(-1, 0, 0)); });
  SpherePolar sp;
  expect_error(ErrorCode::CutLocus, [&] { log_map(sp, v2(1.0, 0.0), v2(pi - 1.0, pi)); });
}

TEST(Transport, TrivialCases) {
  HyperbolicPlane h;
  const Vec x = v2(0.5, 1.5), v = v2(0.3, -0.2);
  EXPECT_LT((parallel_transport(h, x, x, v) - v).norm(), 1e-15);
  Euclidean e(2);
  EXPECT_EQ(parallel_transport(e, v2(0, 0), v2(4, -1), v), v);
}

TEST(Transport, SphereQuarterEquator) {
  Sphere s;
  const Vec x = v3(1, 0, 0), y = v3(0, 1, 0);
  GeometryOptions generic;
  generic.path = Path::Generic;
  for (const auto& opt : {GeometryOptions{}, generic}) {
    // The normal to the plane of motion is fixed; the velocity rotates with it.
    EXPECT_LT((parallel_transport(s, x, y, v3(0, 0, 1), opt) - v3(0, 0, 1)).norm(), 1e-8);
    EXPECT_LT((parallel_transport(s, x, y, v3(0, 1, 0), opt) - v3(-1, 0, 0)).norm(), 1e-8);
  }
}

TEST(Curvature, EuclideanIsZero) {
  Euclidean e(3);
  const Vec r = curvature_tensor(e, v3(1, 2, 3), v3(1, 0, 0), v3(0, 1, 0), v3(0, 0, 1));
  EXPECT_EQ(r.norm(), 0.0);
  EXPECT_EQ(sectional_curvature(e, v3(0, 0, 0), v3(1, 0, 0), v3(0, 1, 1)), 0.0);
}

TEST(Curvature, PolarSphereConstantCurvatureIdentity) {
  SpherePolar s;
  const Vec x = v2(1.0, 0.4), u = v2(0.3, 0.5), v = v2(-0.7, 0.2);
  const double uv = inner(s, x, u, v);
  const double wedge = inner(s, x, u, u) * inner(s, x, v, v) - uv * uv;
  EXPECT_NEAR(inner(s, x, curvature_tensor(s, x, u, v, v), u), wedge, 1e-5);
  const Vec w = v2(0.1, -0.9);
  EXPECT_LT((curvature_tensor(s, x, u, v, w) + curvature_tensor(s, x, v, u, w)).norm(), 1e-12);
}

TEST(Curvature, SectionalCurvatureOfModelSpaces) {
  SpherePolar s;
  EXPECT_NEAR(sectional_curvature(s, v2(0.8, 1.0), v2(1, 0), v2(0.2, 1)), 1.0, 1e-4);
  HyperbolicPlane h;
  EXPECT_NEAR(sectional_curvature(h, v2(0.5, 0.7), v2(1, 0.3), v2(-0.2, 1)), -1.0, 1e-4);
  PlainHalfPlane hp;
  EXPECT_NEAR(sectional_curvature(hp, v2(0.5, 0.7), v2(1, 0.3), v2(-0.2, 1)), -1.0, 1e-4);
}

TEST(Curvature, DegeneratePlane) {
  HyperbolicPlane h;
  expect_error(ErrorCode::DegeneratePlane, [&] { sectional_curvature(h, v2(0, 1), v2(1, 2), v2(2, 4)); });
}

TEST(CurvatureOfCovariance, ZeroAndFlat) {
  HyperbolicPlane h;
  EXPECT_LT(curvature_of_covariance(h, v2(0, 1), Mat::Zero(2, 2)).norm(), 1e-15);
  Euclidean e(2);
  Mat c(2, 2);
  c << 2, 0.5, 0.5, 1;
  // Coefficients come from finite differences of a constant metric.
  EXPECT_LT(curvature_of_covariance(e, v2(1, 1), c).norm(), 1e-8);
}

TEST(CurvatureOfCovariance, Linear) {
  const auto m = make_manifold("spd2");
  const CurvatureOperator a = normal_coefficients(*m, m->reference_point());
  Mat c1(3, 3), c2(3, 3);
  c1 << 2, 0.3, 0, 0.3, 1, 0.1, 0, 0.1, 0.5;
  c2 << 1, 0, 0.2, 0, 1, 0, 0.2, 0, 3;
  const Mat lhs = curvature_of_covariance(a, 2 * c1 + 3 * c2);
  const Mat rhs = 2 * curvature_of_covariance(a, c1) + 3 * curvature_of_covariance(a, c2);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((lhs - lhs.transpose()).norm(), 1e-12);
}

TEST(CurvatureOfCovariance, ConstantCurvatureForm) {
  // For constant curvature K, R(C) = K (tr C I - C).
  Mat c(2, 2);
  c << 1.5, -0.4, -0.4, 0.7;
  const Mat expected = c.trace() * Mat::Identity(2, 2) - c;
  Sphere s;
  EXPECT_LT((curvature_of_covariance(s, v3(0, 0.6, 0.8), c) - expected).norm(), 1e-6);
  HyperbolicPlane h;
  EXPECT_LT((curvature_of_covariance(h, v2(0.3, 1.2), c) + expected).norm(), 1e-6);
}

TEST(CurvatureOfCovariance, Errors) {
  HyperbolicPlane h;
  Mat bad(2, 2);
  bad << 1, 0, 0, -1;
  expect_error(ErrorCode::NotPSD, [&] { curvature_of_covariance(h, v2(0, 1), bad); });
  expect_error(ErrorCode::DimensionMismatch, [&] { curvature_of_covariance(h, v2(0, 1), Mat::Identity(3, 3)); });
}

TEST(CurvatureOperator, BianchiAndSymmetries) {
  for (const auto& name : {"sphere", "hyperbolic", "spd2", "sphere_polar"}) {
    const auto m = make_manifold(name);
    const CurvatureOperator a = normal_coefficients(*m, m->reference_point());
    EXPECT_LT(a.bianchi_residual(), 1e-5) << name;
    EXPECT_LT(a.symmetry_residual(), 1e-5) << name;
    const CurvatureOperator b = tensor_coefficients(*m, m->reference_point());
    const int d = m->dim();
    double worst = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l) worst = std::max(worst, std::abs(a(i, j, k, l) - b(i, j, k, l)));
    EXPECT_LT(worst, 1e-6) << name;
  }
}

TEST(Dexp, IdentityCases) {
  Sphere s;
  EXPECT_LT((dexp(s, v3(0, 0, 1), Vec::Zero(3)) - Mat::Identity(2, 2)).norm(), 1e-8);
  Euclidean e(2);
  EXPECT_LT((dexp(e, v2(1, 1), v2(3, -2)) - Mat::Identity(2, 2)).norm(), 1e-8);
  EXPECT_LT((dlog(e, v2(1, 1), v2(3, -2)) - Mat::Identity(2, 2)).norm(), 1e-8);
}

TEST(Dexp, SphereTransverseFactor) {
  // On the unit sphere dexp(h) is diag(1, sin r / r) in a frame aligned with h.
  Sphere s;
  const Vec x = v3(0, 0, 1);
  const Mat e = s.frame(x);
  const double r = 0.9;
  const Vec h = r * e.col(0);
  const Mat d = dexp(s, x, h);
  EXPECT_NEAR(d(0, 0), 1.0, 1e-7);
  EXPECT_NEAR(d(1, 1), std::sin(r) / r, 1e-7);
  EXPECT_NEAR(d(0, 1), 0.0, 1e-7);
  EXPECT_NEAR(d(1, 0), 0.0, 1e-7);
}

TEST(Invariants, MetricCompatibilityAndRoundTrip) {
  CheckOptions opt;
  opt.cases = 25;
  for (const auto& name : builtin_manifold_names()) {
    const auto m = make_manifold(name);
    EXPECT_LT(transport_isometry_error(*m, opt), 1e-7) << name;
    EXPECT_LT(round_trip_error(*m, opt), 1e-7) << name;
  }
}

TEST(Invariants, ClosedFormsMatchOdePipeline) {
  CheckOptions opt;
  opt.cases = 10;
  for (const auto& name : {"sphere", "hyperbolic", "spd2"}) {
    const OracleErrors e = closed_form_errors(*make_manifold(name), opt);
    EXPECT_LT(e.exp, 1e-8) << name;
    EXPECT_LT(e.log, 1e-8) << name;
    EXPECT_LT(e.transport, 1e-8) << name;
  }
}

TEST(Invariants, SeriesOrders) {
  for (const auto& name : {"sphere", "hyperbolic", "spd2"}) {
    const auto m = make_manifold(name);
    EXPECT_GE(jacobi_series_slope(*m).slope, 2.7) << name;
    EXPECT_GE(log_expansion_slope(*m).slope, 1.8) << name;
    EXPECT_GT(transport_expansion_slope(*m).slope, 1.0) << name;
  }
}

TEST(Invariants, GeometryCheckReportsEveryRow) {
  CheckOptions opt;
  opt.cases = 10;
  const CheckReport rep = geometry_check(*make_manifold("hyperbolic"), opt);
  EXPECT_FALSE(rep.rows.empty());
  EXPECT_TRUE(rep.all_pass()) << rep.table();
}

TEST(Builtins, UnknownNameRejected) {
  expect_error(ErrorCode::Config, [] { make_manifold("torus"); });
  EXPECT_EQ(make_manifold("euclidean3")->dim(), 3);
}
