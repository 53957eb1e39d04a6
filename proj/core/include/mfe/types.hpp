#pragma once

#include <Eigen/Core>

namespace mfe {

/// Upper bound on chart dimension. Vectors and matrices below use inline
/// storage up to this size so that hot loops never touch the heap.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Chart coordinates of a manifold point.
struct Point {
  Vec coords;
};

/// A tangent vector: chart components attached to a base point.
struct Tangent {
  Point base;
  Vec comps;
};

}  // namespace mfe
