#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "mfe/bounds/crlb.hpp"
#include "mfe/bounds/van_trees.hpp"
#include "mfe/errors.hpp"
#include "mfe/geometry/builtin.hpp"
#include "mfe/stats/linalg.hpp"

using namespace mfe;
using std::numbers::pi;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

FisherInfo info(const Vec& base, const Mat& g) { return FisherInfo{base, g, false}; }

Mat spd2x2(double a, double b, double c) {
  Mat m(2, 2);
  m << a, b, b, c;
  return m;
}

}  // namespace

TEST(Crlb, FlatManifoldHasNoCurvatureTerms) {
  Euclidean e(2);
  const Mat g = spd2x2(2.0, 0.3, 1.0);
  Mat dpsi(1, 2);
  dpsi << 1.0, -2.0;
  const Mat expected = dpsi * g.inverse() * dpsi.transpose();
  // Zero up to the finite-difference noise of the normal-coordinate coefficients.
  EXPECT_LT((crlb_curved(info(v2(0, 0), g), e, v2(0, 0), dpsi) - expected).norm(), 1e-9);
}

TEST(Crlb, HyperbolicIdentityInformation) {
  // K = -1: R(I) = -(tr I I - I) = -I, so I - (2/3) R(I) = (5/3) I.
  HyperbolicPlane h;
  const Mat b = crlb_curved(info(v2(0, 1), Mat::Identity(2, 2)), h, v2(0, 1), Mat::Identity(2, 2));
  EXPECT_LT((b - Mat::Identity(2, 2) * (5.0 / 3.0)).norm(), 1e-6);
  EXPECT_LT((b - b.transpose()).norm(), 1e-12);
}

TEST(Crlb, SymmetricForGeneralInputs) {
  const auto m = make_manifold("spd2");
  Mat g(3, 3);
  g << 3, 0.4, 0.1, 0.4, 2, -0.3, 0.1, -0.3, 1.5;
  Mat dpsi(3, 3);
  dpsi << 1, 0.2, 0, 0, 1, 0.5, 0.3, 0, 1;
  const Mat b = crlb_curved(info(m->reference_point(), g), *m, m->reference_point(), dpsi);
  EXPECT_LT((b - b.transpose()).norm(), 1e-12);
}

TEST(CrlbN, NOneEqualsCurvedAndConvergesAtRateOneOverN) {
  HyperbolicPlane h;
  const FisherInfo g = info(v2(0, 1), Mat::Identity(2, 2) * 4.3);
  const Mat dpsi = Mat::Identity(2, 2);
  const CurvatureOperator a = normal_coefficients(h, v2(0, 1));
  EXPECT_LT((crlb_n(g, a, dpsi, 1) - crlb_curved(g, a, dpsi)).norm(), 1e-15);

  const Mat asym = crlb_asymptotic(g, dpsi);
  Eigen::VectorXd ns(4), gaps(4);
  for (int i = 0; i < 4; ++i) {
    const int n = 100 * (1 << (2 * i));
    ns[i] = n;
    gaps[i] = (n * crlb_n(g, a, dpsi, n) - asym).norm();
  }
  EXPECT_NEAR(loglog_slope(ns, gaps), -1.0, 0.01);
  const double g100 = (100 * crlb_n(g, a, dpsi, 100) - asym).norm();
  const double g10k = (10000 * crlb_n(g, a, dpsi, 10000) - asym).norm();
  EXPECT_NEAR(g100 / g10k, 100.0, 10.0);
}

TEST(References, SharedMatrix) {
  const FisherInfo g = info(v2(0, 0), Mat::Identity(2, 2));
  EXPECT_EQ(convolution_reference(g, Mat::Identity(2, 2)), Mat::Identity(2, 2));
  const FisherInfo g2 = info(v2(0, 1), spd2x2(4.0, 1.0, 3.0));
  Mat dpsi(2, 2);
  dpsi << 1, 2, 0, 1;
  EXPECT_EQ(convolution_reference(g2, dpsi), crlb_asymptotic(g2, dpsi));
  EXPECT_EQ(lam_reference(g2, dpsi), convolution_reference(g2, dpsi));
  const double s = 0.7;
  Mat g1(1, 1);
  g1 << 1 / (s * s);
  EXPECT_NEAR(lam_reference(info(Vec::Zero(1), g1), Mat::Identity(1, 1))(0, 0), s * s, 1e-15);
}

TEST(PsdGap, Basic) {
  const Mat b = spd2x2(2, 0.5, 1);
  EXPECT_NEAR(psd_gap(b, b), 0.0, 1e-15);
  EXPECT_NEAR(psd_gap(b + Mat::Identity(2, 2), b), 1.0, 1e-12);
  try {
    psd_gap(b, Mat::Identity(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(VanTrees, UniformPriorRejected) {
  RiemannianGaussian g(make_manifold("euclidean1"), Vec::Zero(1), 1.0);
  PriorSpec p;
  p.shape = PriorSpec::Shape::Uniform;
  p.center = Vec::Zero(1);
  try {
    van_trees_middle(g, p, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PriorNotSmooth);
  }
}

TEST(VanTrees, PriorQuadrature) {
  PriorSpec p;
  p.center = Vec::Zero(2);
  p.half_width = 0.4;
  const PriorQuadrature q = prior_quadrature(p, 2);
  EXPECT_NEAR(q.mass, 1.0, 1e-10);
  EXPECT_LT((q.information - Mat::Identity(2, 2) * (pi * pi / 0.16)).norm(), 1e-6 * pi * pi / 0.16);
}

TEST(VanTrees, FlatMiddleMatrixIsClosedForm) {
  const double s = 0.8;
  RiemannianGaussian g(make_manifold("euclidean1"), Vec::Zero(1), s);
  for (double w : {0.1, 1.0, 10.0}) {
    PriorSpec p;
    p.center = Vec::Zero(1);
    p.half_width = w;
    const double expected = 1.0 / (pi * pi / (w * w) + 50 / (s * s));
    EXPECT_NEAR(van_trees_middle(g, p, 50)(0, 0) / expected, 1.0, 1e-6) << w;
  }
}

TEST(VanTrees, BoundMonotoneInSpreadAndApproachesCrlbForWidePriors) {
  const double s = 1.0;
  const int n = 50;
  RiemannianGaussian g(make_manifold("euclidean1"), Vec::Zero(1), s);
  double prev = 0.0;
  for (double w : {0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    PriorSpec p;
    p.center = Vec::Zero(1);
    p.half_width = w;
    const double b = van_trees_middle(g, p, n)(0, 0);
    EXPECT_GT(b, prev) << w;
    prev = b;
  }
  // Wide priors carry no information, leaving the classical CRLB.
  EXPECT_NEAR(prev / (s * s / n), 1.0, 0.05);
  // A concentrated prior dominates the data: the bound collapses toward 0,
  // well below the CRLB.
  PriorSpec tight;
  tight.center = Vec::Zero(1);
  tight.half_width = 0.0625;
  EXPECT_LT(van_trees_middle(g, tight, n)(0, 0), 0.2 * s * s / n);
}

TEST(VanTrees, BayesRiskOfSampleMeanDominatesBound) {
  const double s = 1.0;
  RiemannianGaussian g(make_manifold("euclidean1"), Vec::Zero(1), s);
  PriorSpec p;
  p.center = Vec::Zero(1);
  p.half_width = 1.0;
  const EstimatorHook mean = [](const std::vector<Vec>& xs) {
    Vec m = Vec::Zero(1);
    for (const auto& x : xs) m += x;
    return Vec(m / double(xs.size()));
  };
  VanTreesOptions opt;
  opt.draws = 1000;
  opt.seed = 3;
  for (int n : {50, 200}) {
    const VanTreesReport r = van_trees_bound(g, p, mean, n, opt);
    // Sample-mean risk is exactly sigma^2 / n for every theta.
    EXPECT_NEAR(r.report.empirical_cov(0, 0) / (s * s / n), 1.0, 0.15) << n;
    EXPECT_NEAR(r.outer_factor(0, 0), 1.0, 1e-6);
    EXPECT_NEAR(r.report.bound_matrix(0, 0), 1.0 / (pi * pi + n / (s * s)), 1e-6);
    EXPECT_TRUE(r.report.pass) << n;
  }
}
