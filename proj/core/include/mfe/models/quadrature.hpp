#pragma once

#include <vector>

#include "mfe/types.hpp"

namespace mfe {

struct QuadNode {
  Vec v;          ///< point in orthonormal-frame (normal) coordinates
  double weight;  ///< quadrature weight, including the polar Jacobian
};

/// Product rule on the Euclidean ball |v| <= radius in polar coordinates:
/// composite Gauss-Legendre (order 20) with `radial_panels` panels in r,
/// Gauss-Legendre in the polar angle (dim 3) and the periodic trapezoid rule
/// with `angular` points in the azimuth. dim must be 1, 2 or 3; otherwise
/// throws QuadratureFail.
std::vector<QuadNode> ball_rule(int dim, double radius, int radial_panels, int angular);

/// Composite Gauss-Legendre (order 20) nodes on [a, b].
std::vector<std::pair<double, double>> gauss_legendre(double a, double b, int panels);

}  // namespace mfe
