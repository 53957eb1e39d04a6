#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "mfe/errors.hpp"
#include "mfe/stats/linalg.hpp"
#include "mfe/stats/parallel.hpp"
#include "mfe/stats/random.hpp"
#include "mfe/stats/tests.hpp"

using namespace mfe;
using Eigen::MatrixXd;

namespace {

MatrixXd normal_rows(int n, int d, double shift, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXd m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal() + (j == 0 ? shift : 0.0);
  return m;
}

double mean_dist(const MatrixXd& a, const MatrixXd& b) {
  double s = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j) s += (a.row(i) - b.row(j)).norm();
  return s / (double(a.rows()) * double(b.rows()));
}

}  // namespace

TEST(Energy, DistanceMatchesDirectFormula) {
  const MatrixXd a = normal_rows(40, 2, 0.0, 1), b = normal_rows(30, 2, 0.5, 2);
  const double expected = 2 * mean_dist(a, b) - mean_dist(a, a) - mean_dist(b, b);
  EXPECT_NEAR(energy_distance(a, b), expected, 1e-12);
  EXPECT_NEAR(energy_statistic(a, b), 40.0 * 30.0 / 70.0 * expected, 1e-10);
  EXPECT_NEAR(energy_distance(a, a), 0.0, 1e-14);
}

TEST(Energy, TestCalibration) {
  EnergyTestOptions opt;
  opt.permutations = 300;
  opt.calibration_size = 150;
  opt.seed = 4;
  const std::vector<MatrixXd> same = {normal_rows(300, 2, 0, 5), normal_rows(300, 2, 0, 6), normal_rows(300, 2, 0, 7)};
  const EnergyTest t0 = energy_test(same, opt);
  EXPECT_EQ(t0.pairs.size(), 3u);
  EXPECT_FALSE(t0.reject);
  const std::vector<MatrixXd> shifted = {normal_rows(300, 2, 0, 5), normal_rows(300, 2, 1.0, 6)};
  const EnergyTest t1 = energy_test(shifted, opt);
  EXPECT_TRUE(t1.reject);
  EXPECT_GT(t1.max_statistic, 5 * t1.threshold);
}

TEST(Energy, WorkerCountDoesNotChangeResult) {
  EnergyTestOptions opt;
  opt.permutations = 100;
  opt.calibration_size = 60;
  opt.seed = 9;
  const std::vector<MatrixXd> g = {normal_rows(80, 2, 0, 1), normal_rows(80, 2, 0.2, 2)};
  const EnergyTest a = energy_test(g, opt);
  opt.workers = 3;
  const EnergyTest b = energy_test(g, opt);
  EXPECT_EQ(a.threshold, b.threshold);
  EXPECT_EQ(a.max_statistic, b.max_statistic);
}

TEST(AndersonDarling, NormalAndSkewedSamples) {
  Rng rng(11);
  std::vector<double> x(2000), y(2000);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = -std::log(rng.uniform());
  EXPECT_GT(anderson_darling_normal(x).p_value, 0.01);
  EXPECT_LT(anderson_darling_normal(y).p_value, 0.01);
}

TEST(Moments, MeanVarianceAndStandardError) {
  const std::vector<double> x = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(mean(x), 2.5);
  EXPECT_DOUBLE_EQ(variance(x), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(mc_se(x), std::sqrt(5.0 / 3.0 / 4.0));
  MatrixXd r(3, 2);
  r << 1, 2, 3, 4, 5, 9;
  const MatrixXd c = covariance(r);
  EXPECT_DOUBLE_EQ(c(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(c(0, 1), 7.0);
  EXPECT_DOUBLE_EQ(c(1, 1), 13.0);
}

TEST(Bootstrap, StandardErrorOfMean) {
  Rng rng(12);
  std::vector<double> x(1000);
  for (auto& v : x) v = rng.normal();
  const double se = bootstrap_se(1000, 400, 3, [&](const std::vector<int>& idx) {
    double s = 0;
    for (int i : idx) s += x[static_cast<size_t>(i)];
    return s / double(idx.size());
  });
  EXPECT_NEAR(se / mc_se(x), 1.0, 0.15);
}

TEST(Random, StreamSeedsAreDistinctAndStable) {
  EXPECT_EQ(stream_seed(1, {2, 3}), stream_seed(1, {2, 3}));
  EXPECT_NE(stream_seed(1, {2, 3}), stream_seed(1, {3, 2}));
  EXPECT_NE(stream_seed(1, {2}), stream_seed(2, {2}));
}

TEST(Parallel, SlotsAndExceptions) {
  std::vector<int> out(100, -1);
  parallel_for(100, 4, [&](int i) { out[static_cast<size_t>(i)] = i * i; });
  for (int i = 0; i < 100; ++i) EXPECT_EQ(out[static_cast<size_t>(i)], i * i);
  EXPECT_THROW(parallel_for(10, 3, [](int i) {
                 if (i == 7) throw std::runtime_error("x");
               }),
               std::runtime_error);
}

TEST(Linalg, ComplementSlopeAndInverse) {
  Eigen::VectorXd u(3);
  u << 0.48, 0.6, 0.64;
  const MatrixXd b = orthonormal_complement(u);
  EXPECT_LT((b.transpose() * u).norm(), 1e-15);
  EXPECT_LT((b.transpose() * b - MatrixXd::Identity(2, 2)).norm(), 1e-15);

  Eigen::VectorXd x(3), y(3);
  x << 1, 10, 100;
  y << 3, 3e-3, 3e-6;
  EXPECT_NEAR(loglog_slope(x, y), -3.0, 1e-12);

  Mat s(2, 2);
  s << 1, 1, 1, 1;
  try {
    sym_inverse(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularInformation);
  }
}
