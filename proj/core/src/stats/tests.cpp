#include "mfe/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "mfe/errors.hpp"
#include "mfe/stats/parallel.hpp"
#include "mfe/stats/random.hpp"

namespace mfe {

namespace {

double mean_cross(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double s = 0.0;
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < b.rows(); ++j) s += (a.row(i) - b.row(j)).norm();
  return s / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

double mean_within(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (long i = 0; i < a.rows(); ++i)
    for (long j = i + 1; j < a.rows(); ++j) s += (a.row(i) - a.row(j)).norm();
  const double n = static_cast<double>(a.rows());
  return 2.0 * s / (n * n);
}

}  // namespace

double energy_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() == 0 || b.rows() == 0) fail(ErrorCode::InvalidArgument, "energy_distance: empty sample");
  if (a.cols() != b.cols()) fail(ErrorCode::DimensionMismatch, "energy_distance: column mismatch");
  return 2.0 * mean_cross(a, b) - mean_within(a) - mean_within(b);
}

double energy_statistic(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double n = static_cast<double>(a.rows()), m = static_cast<double>(b.rows());
  return n * m / (n + m) * energy_distance(a, b);
}

EnergyTest energy_test(const std::vector<Eigen::MatrixXd>& groups, const EnergyTestOptions& opt) {
  const int k = static_cast<int>(groups.size());
  if (k == 0) fail(ErrorCode::InvalidArgument, "energy_test: no groups");
  EnergyTest out;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) out.pairs.emplace_back(i, j);
  if (out.pairs.empty()) return out;  // a single law is trivially equal to itself

  out.statistics.resize(out.pairs.size());
  parallel_for(static_cast<int>(out.pairs.size()), opt.workers, [&](int p) {
    const auto [i, j] = out.pairs[static_cast<size_t>(p)];
    out.statistics[static_cast<size_t>(p)] = energy_statistic(groups[static_cast<size_t>(i)], groups[static_cast<size_t>(j)]);
  });
  out.max_statistic = *std::max_element(out.statistics.begin(), out.statistics.end());

  // Pooled calibration sample with a precomputed distance matrix.
  std::vector<int> sizes(static_cast<size_t>(k));
  long total = 0;
  for (int g = 0; g < k; ++g) {
    sizes[static_cast<size_t>(g)] = static_cast<int>(std::min<long>(groups[static_cast<size_t>(g)].rows(), opt.calibration_size));
    total += sizes[static_cast<size_t>(g)];
  }
  Eigen::MatrixXd pooled(total, groups.front().cols());
  std::vector<int> labels;
  for (int g = 0, r = 0; g < k; ++g) {
    const int s = sizes[static_cast<size_t>(g)];
    pooled.middleRows(r, s) = groups[static_cast<size_t>(g)].topRows(s);
    labels.insert(labels.end(), static_cast<size_t>(s), g);
    r += s;
  }
  Eigen::MatrixXd dist(total, total);
  for (long i = 0; i < total; ++i) {
    dist(i, i) = 0.0;
    for (long j = i + 1; j < total; ++j) dist(i, j) = dist(j, i) = (pooled.row(i) - pooled.row(j)).norm();
  }

  auto max_stat = [&](const std::vector<int>& lab) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, k);
    for (long i = 0; i < total; ++i) {
      const int gi = lab[static_cast<size_t>(i)];
      for (long j = i + 1; j < total; ++j) sums(gi, lab[static_cast<size_t>(j)]) += dist(i, j);
    }
    double best = 0.0;
    for (const auto& [a, b] : out.pairs) {
      const double n = sizes[static_cast<size_t>(a)], m = sizes[static_cast<size_t>(b)];
      const double cross = (sums(a, b) + sums(b, a)) / (n * m);
      const double wa = 2.0 * sums(a, a) / (n * n), wb = 2.0 * sums(b, b) / (m * m);
      best = std::max(best, n * m / (n + m) * (2.0 * cross - wa - wb));
    }
    return best;
  };

  std::vector<double> null(static_cast<size_t>(opt.permutations));
  parallel_for(opt.permutations, opt.workers, [&](int p) {
    Rng rng(stream_seed(opt.seed, {0xe7e7, static_cast<std::uint64_t>(p)}));
    std::vector<int> lab = labels;
    std::shuffle(lab.begin(), lab.end(), rng.engine());
    null[static_cast<size_t>(p)] = max_stat(lab);
  });
  std::sort(null.begin(), null.end());
  const auto idx = static_cast<size_t>(std::ceil((1.0 - opt.level) * static_cast<double>(null.size()))) - 1;
  out.threshold = null[std::min(idx, null.size() - 1)];
  out.reject = out.max_statistic > out.threshold;
  return out;
}

AndersonDarling anderson_darling_normal(const std::vector<double>& x) {
  const size_t n = x.size();
  if (n < 8) fail(ErrorCode::InvalidArgument, "anderson_darling_normal: need at least 8 observations");
  const double mu = mean(x), sd = std::sqrt(variance(x));
  if (!(sd > 0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
  std::vector<double> z(x);
  std::sort(z.begin(), z.end());
  const boost::math::normal_distribution<double> nd;
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double u = (z[i] - mu) / sd;
    const double lo = std::log(boost::math::cdf(nd, u));
    const double hi = std::log(boost::math::cdf(boost::math::complement(nd, (z[n - 1 - i] - mu) / sd)));
    s += (2.0 * static_cast<double>(i) + 1.0) * (lo + hi);
  }
  const double dn = static_cast<double>(n);
  const double a2 = -dn - s / dn;
  const double a = a2 * (1.0 + 0.75 / dn + 2.25 / (dn * dn));
  double p;
  if (a >= 0.6) {
    p = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
  } else if (a >= 0.34) {
    p = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  } else if (a >= 0.2) {
    p = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  } else {
    p = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
  }
  return {a, std::clamp(p, 0.0, 1.0)};
}

double bootstrap_se(int n, int resamples, std::uint64_t seed,
                    const std::function<double(const std::vector<int>&)>& stat, int workers) {
  if (n <= 0 || resamples < 2) fail(ErrorCode::InvalidArgument, "bootstrap_se: bad sizes");
  std::vector<double> vals(static_cast<size_t>(resamples));
  parallel_for(resamples, workers, [&](int b) {
    Rng rng(stream_seed(seed, {0xb007, static_cast<std::uint64_t>(b)}));
    std::vector<int> idx(static_cast<size_t>(n));
    for (int& i : idx) i = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    vals[static_cast<size_t>(b)] = stat(idx);
  });
  return std::sqrt(variance(vals));
}

double mean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double mc_se(const std::vector<double>& x) {
  return x.empty() ? 0.0 : std::sqrt(variance(x) / static_cast<double>(x.size()));
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& rows) {
  const Eigen::MatrixXd c = rows.rowwise() - rows.colwise().mean();
  return c.transpose() * c / std::max(1.0, static_cast<double>(rows.rows()) - 1.0);
}

}  // namespace mfe
