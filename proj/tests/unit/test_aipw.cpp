#include <cmath>

#include <gtest/gtest.h>

#include "mfe/errors.hpp"
#include "mfe/estimators/aipw.hpp"
#include "mfe/geometry/builtin.hpp"
#include "mfe/geometry/ops.hpp"
#include "mfe/models/gaussian.hpp"
#include "mfe/stats/random.hpp"

using namespace mfe;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

const PropensityFn kTruePi = [](const Eigen::VectorXd& z) { return logistic(0.5 + 0.8 * z[0]); };

// X | Z is Gaussian around exp(mu0, 0.3 Z e1), Z ~ U(-2, 2); symmetric about mu0.
std::vector<MarObservation> draw(const RiemannianGaussian& g, int n, std::uint64_t seed, bool complete) {
  const Manifold& m = g.manifold();
  const Vec e1 = from_frame(m, g.center(), Vec::Unit(m.dim(), 0));
  Rng rng(seed);
  std::vector<MarObservation> obs(static_cast<size_t>(n));
  for (auto& o : obs) {
    o.z = Eigen::VectorXd::Constant(1, rng.uniform(-2, 2));
    std::vector<Vec> x;
    g.with_center(exp_map(m, g.center(), 0.3 * o.z[0] * e1)).sample_into(rng, 1, x);
    o.observed = complete || rng.bernoulli(kTruePi(o.z));
    if (o.observed) o.x = x.front();
  }
  return obs;
}

}  // namespace

TEST(Aipw, CompleteDataReducesToFrechetMean) {
  RiemannianGaussian g(make_manifold("hyperbolic"), v2(0, 1), 0.5);
  const auto obs = draw(g, 1000, 1, true);
  std::vector<Vec> xs;
  for (const auto& o : obs) xs.push_back(*o.x);
  FrechetOptions fo;
  fo.compute_influence = true;
  const FrechetResult fr = frechet_mean(g.manifold(), xs, fo);
  const AipwResult ar = aipw_frechet(g.manifold(), obs);
  EXPECT_EQ(ar.estimate, fr.estimate);
  EXPECT_LT((ar.if_sample.rows - fr.per_obs_if.rows).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Aipw, EuclideanMatchesClassicalEstimator) {
  RiemannianGaussian g(make_manifold("euclidean"), v2(0, 0), 1.0);
  const auto obs = draw(g, 2000, 2, false);
  // Arbitrary working regression a(z); m(mu, z) = a(z) - mu.
  const auto a = [](const Eigen::VectorXd& z) { return v2(0.2 * z[0], 1.0 - z[0] * z[0]); };
  AipwOptions opt;
  opt.pi = kTruePi;
  opt.m = [a](const Vec& mu, const Eigen::VectorXd& z) { return Vec(a(z) - mu); };
  const AipwResult r = aipw_frechet(g.manifold(), obs, opt);

  Vec expected = Vec::Zero(2);
  double w_mean = 0;
  for (const auto& o : obs) {
    const double w = o.observed ? 1.0 / kTruePi(o.z) : 0.0;
    expected += (o.observed ? Vec(w * *o.x) : Vec::Zero(2)) - (w - 1) * a(o.z);
    w_mean += w;
  }
  expected /= double(obs.size());
  w_mean /= double(obs.size());
  EXPECT_LT((r.estimate - expected).norm(), 1e-8);

  // IF_i = [R/pi (X - mu) - (R/pi - 1)(a(Z) - mu)] / mean(R/pi).
  for (size_t i = 0; i < obs.size(); ++i) {
    const auto& o = obs[i];
    const double w = o.observed ? 1.0 / kTruePi(o.z) : 0.0;
    const Vec term = (o.observed ? Vec(w * (*o.x - r.estimate)) : Vec::Zero(2)) - (w - 1) * (a(o.z) - r.estimate);
    EXPECT_LT((r.if_sample.rows.row(static_cast<Eigen::Index>(i)).transpose() - term / w_mean).norm(), 1e-8);
  }
}

TEST(Aipw, WrongOutcomeModelStillUnbiasedWithTruePropensity) {
  RiemannianGaussian g(make_manifold("hyperbolic"), v2(0, 1), 0.5);
  const auto obs = draw(g, 20000, 3, false);
  const OutcomeFn wrong = [](const Vec&, const Eigen::VectorXd& z) { return v2(1.0 + z[0], -0.5); };
  const Eigen::MatrixXd t = aipw_terms(g.manifold(), obs, g.center(), kTruePi, wrong);
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd c = t.col(j);
    const double se = std::sqrt((c.array() - c.mean()).square().sum() / (c.size() - 1) / c.size());
    EXPECT_LT(std::abs(c.mean()), 4 * se) << j;
  }
}

TEST(Aipw, PositivityViolation) {
  RiemannianGaussian g(make_manifold("hyperbolic"), v2(0, 1), 0.5);
  const auto obs = draw(g, 200, 4, false);
  AipwOptions opt;
  opt.pi = [](const Eigen::VectorXd& z) { return z[0] > 1.5 ? 0.001 : 0.5; };
  try {
    aipw_frechet(g.manifold(), obs, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PositivityViolation);
  }
}

TEST(Aipw, LogisticFitRecoversCoefficients) {
  Rng rng(5);
  std::vector<MarObservation> obs(20000);
  for (auto& o : obs) {
    o.z = Eigen::VectorXd::Constant(1, rng.uniform(-2, 2));
    o.observed = rng.bernoulli(kTruePi(o.z));
  }
  const LogisticFit f = fit_logistic(obs);
  ASSERT_EQ(f.coef.size(), 2);
  EXPECT_NEAR(f.coef[0], 0.5, 0.1);
  EXPECT_NEAR(f.coef[1], 0.8, 0.1);
  for (auto& o : obs) o.observed = true;
  EXPECT_EQ(fit_logistic(obs)(Eigen::VectorXd::Zero(1)), 1.0);
}
