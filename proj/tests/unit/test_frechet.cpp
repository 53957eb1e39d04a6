#include <cmath>

#include <gtest/gtest.h>

#include "mfe/errors.hpp"
#include "mfe/estimators/frechet.hpp"
#include "mfe/geometry/builtin.hpp"
#include "mfe/geometry/ops.hpp"
#include "mfe/models/gaussian.hpp"
#include "mfe/stats/linalg.hpp"
#include "mfe/stats/random.hpp"

using namespace mfe;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(FrechetMean, SinglePoint) {
  const auto h = make_manifold("hyperbolic");
  const FrechetResult r = frechet_mean(*h, {v2(0.4, 2.0)});
  EXPECT_EQ(r.estimate, v2(0.4, 2.0));
  EXPECT_EQ(r.iterations, 1);
}

TEST(FrechetMean, EuclideanIsArithmeticMean) {
  const auto e = make_manifold("euclidean");
  Rng rng(1);
  std::vector<Vec> xs;
  Vec sum = Vec::Zero(2);
  for (int i = 0; i < 500; ++i) {
    xs.push_back(rng.normal_vec(2) * 3.0);
    sum += xs.back();
  }
  EXPECT_LT((frechet_mean(*e, xs).estimate - sum / 500).norm(), 1e-12);
}

TEST(FrechetMean, HyperbolicGeodesicMidpoint) {
  // On the vertical geodesic x = 0 the midpoint of (0, 1) and (0, 4) is the
  // geometric mean height.
  const auto h = make_manifold("hyperbolic");
  const FrechetResult r = frechet_mean(*h, {v2(0, 1), v2(0, 4)});
  EXPECT_LT((r.estimate - v2(0, 2)).norm(), 1e-9);
  // Off-axis pair: the midpoint is equidistant and on the geodesic.
  const Vec a = v2(-1, 1), b = v2(2, 0.5);
  const Vec mid = frechet_mean(*h, {a, b}).estimate;
  EXPECT_NEAR(distance(*h, a, mid), distance(*h, b, mid), 1e-9);
  EXPECT_NEAR(distance(*h, a, mid) * 2, distance(*h, a, b), 1e-9);
}

TEST(FrechetMean, NonConvexRegionOnSphere) {
  const auto s = make_manifold("sphere");
  Vec a(3), b(3);
  a << 1, 0, 0;
  b << 0, 0, -1;
  Vec c(3);
  c << -1, 0.01, 0;
  c.normalize();
  try {
    frechet_mean(*s, {a, b, c});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvexRegion);
  }
}

TEST(Hodges, ReferenceBranch) {
  const auto h = make_manifold("hyperbolic");
  EXPECT_EQ(hodges(*h, {v2(0, 1)}, v2(0, 1)), v2(0, 1));
}

TEST(Hodges, FarBranchEqualsFrechetMean) {
  const auto h = make_manifold("hyperbolic");
  RiemannianGaussian g(h, v2(3, 2), 0.3);
  const auto xs = g.sample(400, 4);
  EXPECT_EQ(hodges(*h, xs, v2(0, 1)), frechet_mean(*h, xs).estimate);
}

TEST(Hodges, EuclideanCenteredDataSnapsToReference) {
  const auto e = make_manifold("euclidean");
  RiemannianGaussian g(e, v2(0, 0), 1.0);
  int hits = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto xs = g.sample(10000, stream_seed(8, {std::uint64_t(r)}));
    hits += hodges(*e, xs, v2(0, 0)) == v2(0, 0);
  }
  EXPECT_GE(hits, 0.99 * reps);
}

TEST(Influence, EuclideanIsCenteredData) {
  const auto e = make_manifold("euclidean");
  Rng rng(2);
  std::vector<Vec> xs;
  for (int i = 0; i < 50; ++i) xs.push_back(rng.normal_vec(2));
  const Vec mu0 = v2(0.1, -0.2);
  for (auto mode : {InfluenceMode::Jacobian, InfluenceMode::Curvature}) {
    Mat a;
    const InfluenceSample s = influence_frechet(*e, xs, mu0, mode, &a);
    EXPECT_LT((a - Mat::Identity(2, 2)).norm(), 1e-7);
    for (int i = 0; i < 50; ++i) EXPECT_LT((s.rows.row(i).transpose() - (xs[i] - mu0)).norm(), 1e-7);
  }
}

TEST(Influence, ModesAgreeAndCovarianceIsInverseFisher) {
  const auto h = make_manifold("hyperbolic");
  RiemannianGaussian g(h, v2(0, 1), 0.5);
  const auto xs = g.sample(10000, 12);
  Mat a, b;
  const InfluenceSample jac = influence_frechet(*h, xs, g.center(), InfluenceMode::Jacobian, &a);
  const InfluenceSample cur = influence_frechet(*h, xs, g.center(), InfluenceMode::Curvature, &b);
  EXPECT_LT(frobenius_relative(a, b), 0.03);
  EXPECT_LT((jac.rows - cur.rows).norm() / cur.rows.norm(), 0.03);
  // Gaussian family: V = H^-1 Sigma H^-1 with Sigma = sigma^4 G and H = sigma^2 G.
  const Mat v = sym_inverse(fisher_information(g).matrix);
  EXPECT_LT(frobenius_relative(Mat(jac.covariance()), v), 0.05);
}

TEST(FrechetMean, InfluenceRequestedFromEstimator) {
  const auto h = make_manifold("hyperbolic");
  RiemannianGaussian g(h, v2(0, 1), 0.5);
  const auto xs = g.sample(2000, 13);
  FrechetOptions o;
  o.compute_influence = true;
  const FrechetResult r = frechet_mean(*h, xs, o);
  EXPECT_EQ(r.per_obs_if.rows.rows(), 2000);
  // The IF is centered at the estimate because the estimating equation holds there.
  EXPECT_LT(r.per_obs_if.column_means().norm(), 1e-8);
}

TEST(CheckedInverse, SingularThrows) {
  Mat a(2, 2);
  a << 1, 2, 2, 4;
  try {
    checked_inverse(a, ErrorCode::SingularMean);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularMean);
  }
}
