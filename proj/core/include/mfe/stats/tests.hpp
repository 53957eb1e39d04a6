#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace mfe {

/// V-statistic energy distance 2E|X-Y| - E|X-X'| - E|Y-Y'|; rows are draws.
double energy_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Scaled statistic n m / (n + m) * energy_distance, whose null law has an
/// n-free limit.
double energy_statistic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct EnergyTestOptions {
  int permutations = 1000;
  double level = 0.01;
  /// Rows per group used for the permutation null (the leading rows).
  int calibration_size = 300;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct EnergyTest {
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> statistics;  ///< scaled, one per pair
  double max_statistic = 0.0;
  double threshold = 0.0;  ///< (1 - level) permutation quantile of the max
  bool reject = false;
};

/// Equality of all group laws, statistic = max over pairs of the scaled
/// energy statistic; the null is calibrated by permuting pooled labels.
EnergyTest energy_test(const std::vector<Eigen::MatrixXd>& groups, const EnergyTestOptions& opt = {});

struct AndersonDarling {
  double statistic = 0.0;  ///< A^2 with the Stephens small-sample factor
  double p_value = 0.0;
};

/// Normality test with mean and variance estimated (Stephens' case 3).
AndersonDarling anderson_darling_normal(const std::vector<double>& x);

/// Standard deviation of `stat` over `resamples` bootstrap index draws.
double bootstrap_se(int n, int resamples, std::uint64_t seed,
                    const std::function<double(const std::vector<int>&)>& stat, int workers = 1);

double mean(const std::vector<double>& x);
/// Unbiased sample variance.
double variance(const std::vector<double>& x);
/// Monte Carlo standard error of the mean.
double mc_se(const std::vector<double>& x);

/// Sample covariance of the rows.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& rows);

}  // namespace mfe
