#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfe/types.hpp"

namespace mfe {

/// Christoffel symbols of the Levi-Civita connection in chart coordinates:
/// `upper[i](j, k)` holds Gamma^i_{jk}.
struct Christoffel {
  std::vector<Mat> upper;

  int dim() const { return static_cast<int>(upper.size()); }
  double operator()(int i, int j, int k) const { return upper[static_cast<size_t>(i)](j, k); }
};

/// A Riemannian manifold described through one preferred chart.
///
/// The chart may have more coordinates than the intrinsic dimension (the
/// sphere is charted by its embedding in R^3); in that case `project` maps
/// chart vectors onto the tangent space and `frame` returns a
/// `chart_dim x dim` basis that is orthonormal for the metric.
///
/// Closed-form maps are optional fast paths. When `has_closed_forms()` is
/// false the generic ODE pipeline in geometry/ops.hpp is used. Instances are
/// immutable and safe to share between threads.
class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual int chart_dim() const { return dim(); }

  /// Metric tensor G(x) in chart coordinates.
  virtual Mat metric(const Vec& x) const = 0;

  virtual bool in_chart(const Vec& x) const;
  /// A canonical interior point used by diagnostics and presets.
  virtual Vec reference_point() const { return Vec::Zero(chart_dim()); }
  virtual bool in_cut_locus(const Vec& x, const Vec& y) const;

  /// Orthogonal projection of a chart vector onto T_x M.
  virtual Vec project(const Vec& x, const Vec& v) const;

  /// Metric-orthonormal basis of T_x M, as columns of a chart_dim x dim matrix.
  virtual Mat frame(const Vec& x) const;

  /// Default: central finite differences of the metric, step 1e-5 (1 + |x|).
  virtual Christoffel christoffel(const Vec& x) const;

  /// Complete, simply connected, non-positively curved.
  virtual bool is_hadamard() const { return false; }
  /// Isometry group acts transitively, so model partition functions do not
  /// depend on the center.
  virtual bool is_homogeneous() const { return false; }
  /// Lower bound on sectional curvature (used for quadrature tail bounds).
  virtual double curvature_lower_bound() const { return 0.0; }
  /// Largest pairwise sample distance for which the Frechet objective is
  /// geodesically convex on the sample's hull.
  virtual double convex_diameter() const { return std::numeric_limits<double>::infinity(); }
  /// Radius below which exp/log round trips are numerically safe.
  virtual double injectivity_safe_radius() const { return std::numeric_limits<double>::infinity(); }

  virtual bool has_closed_forms() const { return false; }
  virtual Vec exp_closed(const Vec& x, const Vec& v) const;
  virtual Vec log_closed(const Vec& x, const Vec& y) const;
  virtual Vec transport_closed(const Vec& x, const Vec& y, const Vec& v) const;
  virtual double distance_closed(const Vec& x, const Vec& y) const;
  virtual std::optional<double> sectional_closed(const Vec& x, const Vec& u, const Vec& v) const;

  /// Riemannian volume density of the normal chart v -> exp(x, frame(x) v),
  /// when known in closed form.
  virtual std::optional<double> normal_volume_density(const Vec& x, const Vec& v) const;
};

using ManifoldPtr = std::shared_ptr<const Manifold>;

}  // namespace mfe
