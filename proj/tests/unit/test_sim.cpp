#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mfe/errors.hpp"
#include "mfe/estimators/sim.hpp"
#include "mfe/stats/random.hpp"

using namespace mfe;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double z_score(const VectorXd& v) {
  const double m = v.mean();
  const double se = std::sqrt((v.array() - m).square().sum() / double(v.size() - 1) / double(v.size()));
  return std::abs(m) / se;
}

// Spherical Gaussian design, so E[X | beta^T X = u] = beta u.
SimData gaussian_design(int n, int d, double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  SimData s;
  s.x.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) s.x(i, j) = rng.normal();
  s.beta = VectorXd::Ones(d) / std::sqrt(double(d));
  s.g = [](double u) { return std::sin(u) + u; };
  s.g_prime = [](double u) { return std::cos(u) + 1; };
  s.sigma2 = 1.0;
  const VectorXd beta = s.beta;
  s.zeta = [beta](double u) { return VectorXd(beta * u); };
  s.y.resize(n);
  for (int i = 0; i < n; ++i) s.y[i] = s.g(s.x.row(i).dot(s.beta)) + noise_sd * rng.normal();
  return s;
}

}  // namespace

TEST(SimTangentBasis, Properties) {
  const MatrixXd b = sim_tangent_basis(VectorXd::Unit(3, 0));
  EXPECT_LT(b.row(0).norm(), 1e-15);
  EXPECT_LT((b.transpose() * b - MatrixXd::Identity(2, 2)).norm(), 1e-14);

  Rng rng(1);
  for (int d = 2; d <= 6; ++d) {
    VectorXd beta(d);
    for (int i = 0; i < d; ++i) beta[i] = rng.normal();
    beta = beta.normalized().cwiseAbs();
    const MatrixXd bb = sim_tangent_basis(beta);
    ASSERT_EQ(bb.cols(), d - 1);
    EXPECT_LT((bb.transpose() * beta).norm(), 1e-14);
    EXPECT_LT((bb.transpose() * bb - MatrixXd::Identity(d - 1, d - 1)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(SimExp, ClosedFormCases) {
  const VectorXd e1 = VectorXd::Unit(3, 0), e2 = VectorXd::Unit(3, 1);
  EXPECT_EQ(sim_exp(e1, e2, 0.0), e1);
  EXPECT_LT((sim_exp(e1, (std::numbers::pi / 2) * e2, 1.0) - e2).norm(), 1e-15);
  try {
    sim_exp(e1, e1, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotTangent);
  }
}

TEST(SimExp, UnitNorm) {
  Rng rng(2);
  for (int c = 0; c < 200; ++c) {
    const int d = 2 + c % 5;
    VectorXd beta(d), h(d);
    for (int i = 0; i < d; ++i) beta[i] = rng.normal(), h[i] = rng.normal();
    beta.normalize();
    h -= h.dot(beta) * beta;
    EXPECT_NEAR(sim_exp(beta, h, rng.uniform(-4, 4)).norm(), 1.0, 1e-14);
  }
}

TEST(SimScore, ZeroCases) {
  SimData s = gaussian_design(100, 3, 0.0, 3);
  const VectorXd h = sim_tangent_basis(s.beta).col(0);
  EXPECT_LT(sim_score(s, h).cwiseAbs().maxCoeff(), 1e-12);
  SimData noisy = gaussian_design(100, 3, 1.0, 3);
  EXPECT_EQ(sim_score(noisy, VectorXd::Zero(3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(SimScore, MeanZero) {
  SimData s = gaussian_design(50000, 3, 1.0, 4);
  const MatrixXd b = sim_tangent_basis(s.beta);
  for (int k = 0; k < b.cols(); ++k) EXPECT_LT(z_score(sim_score(s, b.col(k))), 4.0) << k;
}

TEST(SimEfficientScore, SphericalDesignProjectsOffIndex) {
  SimData s = gaussian_design(500, 4, 1.0, 5);
  const MatrixXd b = sim_tangent_basis(s.beta);
  for (int k = 0; k < b.cols(); ++k) {
    const VectorXd h = b.col(k);
    // (X - beta beta^T X)^T h computed directly.
    const MatrixXd xp = s.x - (s.x * s.beta) * s.beta.transpose();
    VectorXd expected(s.x.rows());
    for (int i = 0; i < s.x.rows(); ++i) {
      const double u = s.x.row(i).dot(s.beta);
      expected[i] = (s.y[i] - s.g(u)) / s.sigma2 * s.g_prime(u) * xp.row(i).dot(h);
    }
    EXPECT_LT((sim_efficient_score(s, h) - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SimEfficientScore, OrthogonalToNuisanceScores) {
  SimData s = gaussian_design(50000, 3, 1.0, 6);
  const MatrixXd b = sim_tangent_basis(s.beta);
  const VectorXd u = s.x * s.beta;
  const std::function<double(double)> tests[] = {[](double) { return 1.0; }, [](double t) { return t; },
                                                 [](double t) { return std::sin(t); }};
  for (int k = 0; k < b.cols(); ++k) {
    const VectorXd se = sim_efficient_score(s, b.col(k));
    for (const auto& a : tests) {
      VectorXd prod(u.size());
      for (int i = 0; i < u.size(); ++i) prod[i] = se[i] * a(u[i]) * (s.y[i] - s.g(u[i]));
      EXPECT_LT(z_score(prod), 4.0);
    }
  }
}

TEST(SimEfficiencyBound, TwoDimensionalAngleModel) {
  // X uniform on [-1, 1]^2, g = id, sigma = 1, beta at 45 degrees. The
  // angle-a submodel has information E[(-sin a X1 + cos a X2)^2] = 1/3.
  Rng rng(7);
  const int n = 100000;
  SimData s;
  s.x.resize(n, 2);
  for (int i = 0; i < n; ++i) s.x.row(i) << rng.uniform(-1, 1), rng.uniform(-1, 1);
  s.beta = VectorXd::Ones(2) / std::sqrt(2.0);
  s.g = [](double t) { return t; };
  s.g_prime = [](double) { return 1.0; };
  s.sigma2 = 1.0;
  const VectorXd beta = s.beta;
  s.zeta = [beta](double u) { return VectorXd(beta * u); };
  s.y = s.x * s.beta;
  for (int i = 0; i < n; ++i) s.y[i] += rng.normal();
  const MatrixXd bound = sim_efficiency_bound(s);
  ASSERT_EQ(bound.rows(), 1);
  EXPECT_NEAR(bound(0, 0) / 3.0, 1.0, 0.03);
}

TEST(SimEfficiencyBound, SingularInformation) {
  SimData s = gaussian_design(50, 2, 1.0, 8);
  s.g_prime = [](double) { return 0.0; };
  try {
    sim_efficiency_bound(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularEfficientInformation);
  }
}

TEST(NadarayaWatson, RecoversLinearConditionalMean) {
  SimData s = gaussian_design(20000, 3, 1.0, 9);
  const auto zeta = nadaraya_watson_zeta(s.x, s.beta);
  for (double u : {-1.0, 0.0, 0.7}) EXPECT_LT((zeta(u) - s.beta * u).norm(), 0.1) << u;
}
