#include "mfe/models/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "mfe/errors.hpp"

namespace mfe {

std::vector<std::pair<double, double>> gauss_legendre(double a, double b, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<size_t>(panels) * 20);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width, half = 0.5 * width;
    for (size_t i = 0; i < x.size(); ++i) {
      out.emplace_back(mid + half * x[i], half * w[i]);
      if (x[i] != 0.0) out.emplace_back(mid - half * x[i], half * w[i]);
    }
  }
  return out;
}

std::vector<QuadNode> ball_rule(int dim, double radius, int radial_panels, int angular) {
  std::vector<QuadNode> out;
  const double two_pi = 2.0 * std::numbers::pi;
  if (dim == 1) {
    for (auto [r, w] : gauss_legendre(-radius, radius, 2 * radial_panels)) {
      Vec v(1);
      v << r;
      out.push_back({v, w});
    }
    return out;
  }
  const auto radial = gauss_legendre(0.0, radius, radial_panels);
  if (dim == 2) {
    for (auto [r, w] : radial) {
      for (int j = 0; j < angular; ++j) {
        const double phi = two_pi * j / angular;
        Vec v(2);
        v << r * std::cos(phi), r * std::sin(phi);
        out.push_back({v, w * r * two_pi / angular});
      }
    }
    return out;
  }
  if (dim == 3) {
    const auto polar = gauss_legendre(0.0, std::numbers::pi, std::max(1, angular / 32));
    for (auto [r, w] : radial) {
      for (auto [th, wt] : polar) {
        for (int j = 0; j < angular; ++j) {
          const double phi = two_pi * j / angular;
          Vec v(3);
          v << r * std::sin(th) * std::cos(phi), r * std::sin(th) * std::sin(phi), r * std::cos(th);
          out.push_back({v, w * wt * r * r * std::sin(th) * two_pi / angular});
        }
      }
    }
    return out;
  }
  fail(ErrorCode::QuadratureFail, "ball quadrature supports dimensions 1 to 3");
}

}  // namespace mfe
