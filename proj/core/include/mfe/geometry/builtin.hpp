#pragma once

#include <string>
#include <vector>

#include "mfe/geometry/manifold.hpp"

namespace mfe {

/// Flat R^d with identity metric.
class Euclidean final : public Manifold {
 public:
  explicit Euclidean(int d);

  std::string name() const override;
  int dim() const override { return d_; }
  Mat metric(const Vec& x) const override;
  Mat frame(const Vec& x) const override;
  Christoffel christoffel(const Vec& x) const override;

  bool is_hadamard() const override { return true; }
  bool is_homogeneous() const override { return true; }

  bool has_closed_forms() const override { return true; }
  Vec exp_closed(const Vec& x, const Vec& v) const override;
  Vec log_closed(const Vec& x, const Vec& y) const override;
  Vec transport_closed(const Vec& x, const Vec& y, const Vec& v) const override;
  double distance_closed(const Vec& x, const Vec& y) const override;
  std::optional<double> sectional_closed(const Vec& x, const Vec& u, const Vec& v) const override;
  std::optional<double> normal_volume_density(const Vec& x, const Vec& v) const override;

 private:
  int d_;
};

/// Unit sphere S^2 charted by its embedding in R^3. Tangent vectors at x are
/// the 3-vectors orthogonal to x. The connection coefficients are the
/// extrinsic form Gamma^i_{jk}(x) = x^i delta_{jk}, which agrees with the
/// Levi-Civita connection on tangent vectors.
class Sphere final : public Manifold {
 public:
  std::string name() const override { return "sphere"; }
  int dim() const override { return 2; }
  int chart_dim() const override { return 3; }
  Mat metric(const Vec& x) const override;
  bool in_chart(const Vec& x) const override;
  Vec reference_point() const override { return Vec::Unit(3, 2); }
  bool in_cut_locus(const Vec& x, const Vec& y) const override;
  Vec project(const Vec& x, const Vec& v) const override;
  Mat frame(const Vec& x) const override;
  Christoffel christoffel(const Vec& x) const override;

  double curvature_lower_bound() const override { return 1.0; }
  double convex_diameter() const override;
  double injectivity_safe_radius() const override { return 3.0; }

  bool has_closed_forms() const override { return true; }
  Vec exp_closed(const Vec& x, const Vec& v) const override;
  Vec log_closed(const Vec& x, const Vec& y) const override;
  Vec transport_closed(const Vec& x, const Vec& y, const Vec& v) const override;
  double distance_closed(const Vec& x, const Vec& y) const override;
  std::optional<double> sectional_closed(const Vec& x, const Vec& u, const Vec& v) const override;
  std::optional<double> normal_volume_density(const Vec& x, const Vec& v) const override;

  /// Angle (in radians) at which two points are treated as antipodal.
  static constexpr double kCutLocusMargin = 1e-6;
};

/// Unit sphere in polar coordinates (theta, phi), theta in (0, pi), metric
/// diag(1, sin^2 theta). No closed forms: exercises the generic ODE pipeline.
class SpherePolar final : public Manifold {
 public:
  std::string name() const override { return "sphere_polar"; }
  int dim() const override { return 2; }
  Mat metric(const Vec& x) const override;
  bool in_chart(const Vec& x) const override;
  Vec reference_point() const override;
  bool in_cut_locus(const Vec& x, const Vec& y) const override;
  double curvature_lower_bound() const override { return 1.0; }
  double convex_diameter() const override;
  double injectivity_safe_radius() const override { return 1.0; }
  std::optional<double> sectional_closed(const Vec&, const Vec&, const Vec&) const override {
    return 1.0;
  }
};

/// Hyperbolic plane in the Poincare upper half-plane chart (x, y), y > 0,
/// metric (dx^2 + dy^2) / y^2. Closed forms go through the hyperboloid model.
class HyperbolicPlane final : public Manifold {
 public:
  std::string name() const override { return "hyperbolic"; }
  int dim() const override { return 2; }
  Mat metric(const Vec& x) const override;
  bool in_chart(const Vec& x) const override;
  Vec reference_point() const override { return Vec::Unit(2, 1); }
  Mat frame(const Vec& x) const override;
  Christoffel christoffel(const Vec& x) const override;

  bool is_hadamard() const override { return true; }
  bool is_homogeneous() const override { return true; }
  double curvature_lower_bound() const override { return -1.0; }

  bool has_closed_forms() const override { return true; }
  Vec exp_closed(const Vec& x, const Vec& v) const override;
  Vec log_closed(const Vec& x, const Vec& y) const override;
  Vec transport_closed(const Vec& x, const Vec& y, const Vec& v) const override;
  double distance_closed(const Vec& x, const Vec& y) const override;
  std::optional<double> sectional_closed(const Vec& x, const Vec& u, const Vec& v) const override;
  std::optional<double> normal_volume_density(const Vec& x, const Vec& v) const override;
};

/// 2x2 symmetric positive-definite matrices [[a, b], [b, c]] charted by the
/// lower-triangular entries (a, b, c), with the affine-invariant metric
/// <U, V>_P = tr(P^-1 U P^-1 V).
class Spd2 final : public Manifold {
 public:
  std::string name() const override { return "spd2"; }
  int dim() const override { return 3; }
  Mat metric(const Vec& x) const override;
  bool in_chart(const Vec& x) const override;
  Vec reference_point() const override;
  /// Gamma(U, V) = -(U P^-1 V + V P^-1 U) / 2.
  Christoffel christoffel(const Vec& x) const override;

  bool is_hadamard() const override { return true; }
  bool is_homogeneous() const override { return true; }
  double curvature_lower_bound() const override { return -0.5; }

  bool has_closed_forms() const override { return true; }
  Vec exp_closed(const Vec& x, const Vec& v) const override;
  Vec log_closed(const Vec& x, const Vec& y) const override;
  Vec transport_closed(const Vec& x, const Vec& y, const Vec& v) const override;
  double distance_closed(const Vec& x, const Vec& y) const override;
  std::optional<double> sectional_closed(const Vec& x, const Vec& u, const Vec& v) const override;
  std::optional<double> normal_volume_density(const Vec& x, const Vec& v) const override;
};

/// Resolves "euclidean" (2-D), "euclidean<d>", "sphere", "sphere_polar",
/// "hyperbolic", "spd2". Throws ErrorCode::Config for unknown names.
ManifoldPtr make_manifold(const std::string& name);

std::vector<std::string> builtin_manifold_names();

}  // namespace mfe
