#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mfe/bounds/crlb.hpp"
#include "mfe/models/gaussian.hpp"
#include "mfe/types.hpp"

namespace mfe {

/// Product prior on normal coordinates u (orthonormal frame) at `center`,
/// supported on the box [-half_width, half_width]^dim.
struct PriorSpec {
  enum class Shape {
    /// (1/w) cos^2(pi u / 2w) per coordinate; density and derivative vanish
    /// at the boundary. Prior information pi^2 / w^2 per coordinate.
    CosineSquared,
    /// Flat on the box. Rejected: the density jumps at the boundary.
    Uniform,
  };
  Shape shape = Shape::CosineSquared;
  Vec center;
  double half_width = 1.0;
  /// Gauss-Legendre (order 20) panels per coordinate.
  int panels = 2;
};

using EstimatorHook = std::function<Vec(const std::vector<Vec>& sample)>;

struct VanTreesOptions {
  int draws = 2000;
  std::uint64_t seed = 0;
  int workers = 1;
  int bootstrap = 200;
  double slack_se = 3.0;
};

struct VanTreesReport {
  /// bound_matrix = A (G_pi + n int G dpi)^{-1} A^T; empirical_cov is the
  /// Bayes risk E_pi E[v v^T], v = log(theta, psi_hat) carried to the center.
  BoundReport report;
  Mat prior_information;
  Mat mean_information;
  /// E_pi E[-grad_theta log(theta, psi_hat)] (approximately I).
  Mat outer_factor;
};

/// Prior information G_pi and the prior mass, by quadrature.
struct PriorQuadrature {
  Mat information;
  double mass = 0.0;
  std::vector<QuadNode> nodes;  ///< u and probability weight
};
PriorQuadrature prior_quadrature(const PriorSpec& prior, int dim);

/// Draw u ~ prior (normal coordinates).
Vec sample_prior(const PriorSpec& prior, int dim, Rng& rng);

/// (G_pi + n int G dpi)^{-1} in normal coordinates at the prior center.
/// Throws PriorNotSmooth, QuadratureFail.
Mat van_trees_middle(const RiemannianGaussian& family, const PriorSpec& prior, int n,
                     Mat* prior_info = nullptr, Mat* mean_info = nullptr);

/// Full intrinsic van Trees comparison for the estimator `estimator`, with
/// the outer factor and the Bayes risk estimated by Monte Carlo over
/// (theta ~ prior, data ~ P_theta^n).
VanTreesReport van_trees_bound(const RiemannianGaussian& family, const PriorSpec& prior,
                               const EstimatorHook& estimator, int n, const VanTreesOptions& opt = {});

}  // namespace mfe
