#include "mfe/geometry/builtin.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "mfe/errors.hpp"
#include "mfe/stats/linalg.hpp"

namespace mfe {

namespace {

double sinhc(double r) { return std::abs(r) < 1e-8 ? 1.0 + r * r / 6.0 : std::sinh(r) / r; }
double sinc(double r) { return std::abs(r) < 1e-8 ? 1.0 - r * r / 6.0 : std::sin(r) / r; }

}  // namespace

// ---------------------------------------------------------------- Euclidean

Euclidean::Euclidean(int d) : d_(d) {
  if (d < 1 || d > kMaxDim) fail(ErrorCode::Config, "euclidean: unsupported dimension");
}

std::string Euclidean::name() const { return d_ == 2 ? "euclidean" : "euclidean" + std::to_string(d_); }
Mat Euclidean::metric(const Vec&) const { return Mat::Identity(d_, d_); }
Mat Euclidean::frame(const Vec&) const { return Mat::Identity(d_, d_); }

Christoffel Euclidean::christoffel(const Vec&) const {
  Christoffel c;
  c.upper.assign(static_cast<size_t>(d_), Mat::Zero(d_, d_));
  return c;
}

Vec Euclidean::exp_closed(const Vec& x, const Vec& v) const { return x + v; }
Vec Euclidean::log_closed(const Vec& x, const Vec& y) const { return y - x; }
Vec Euclidean::transport_closed(const Vec&, const Vec&, const Vec& v) const { return v; }
double Euclidean::distance_closed(const Vec& x, const Vec& y) const { return (y - x).norm(); }
std::optional<double> Euclidean::sectional_closed(const Vec&, const Vec&, const Vec&) const {
  return 0.0;
}
std::optional<double> Euclidean::normal_volume_density(const Vec&, const Vec&) const { return 1.0; }

// ------------------------------------------------------------------- Sphere

Mat Sphere::metric(const Vec&) const { return Mat::Identity(3, 3); }

bool Sphere::in_chart(const Vec& x) const {
  return x.size() == 3 && x.allFinite() && std::abs(x.norm() - 1.0) < 1e-3;
}

bool Sphere::in_cut_locus(const Vec& x, const Vec& y) const {
  return distance_closed(x, y) >= std::numbers::pi - kCutLocusMargin;
}

Vec Sphere::project(const Vec& x, const Vec& v) const { return v - x.dot(v) * x; }

Mat Sphere::frame(const Vec& x) const {
  const Eigen::VectorXd u = x.normalized();
  return orthonormal_complement(u);
}

Christoffel Sphere::christoffel(const Vec& x) const {
  Christoffel c;
  c.upper.resize(3);
  for (int i = 0; i < 3; ++i) c.upper[static_cast<size_t>(i)] = x[i] * Mat::Identity(3, 3);
  return c;
}

double Sphere::convex_diameter() const { return std::numbers::pi / 2.0; }

Vec Sphere::exp_closed(const Vec& x, const Vec& v) const {
  const double t = v.norm();
  if (t == 0.0) return x;
  return std::cos(t) * x + sinc(t) * v;
}

Vec Sphere::log_closed(const Vec& x, const Vec& y) const {
  const Vec w = y - x.dot(y) * x;
  const double s = w.norm();
  if (s == 0.0) {
    if (x.dot(y) > 0.0) return Vec::Zero(3);
    fail(ErrorCode::CutLocus, "sphere: antipodal points");
  }
  const double angle = std::atan2(s, x.dot(y));
  return (angle / s) * w;
}

Vec Sphere::transport_closed(const Vec& x, const Vec& y, const Vec& v) const {
  return v - (y.dot(v) / (1.0 + x.dot(y))) * (x + y);
}

double Sphere::distance_closed(const Vec& x, const Vec& y) const {
  const Eigen::Vector3d a = x.head<3>(), b = y.head<3>();
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

std::optional<double> Sphere::sectional_closed(const Vec&, const Vec&, const Vec&) const {
  return 1.0;
}

std::optional<double> Sphere::normal_volume_density(const Vec&, const Vec& v) const {
  return sinc(v.norm());
}

// -------------------------------------------------------------- SpherePolar

Mat SpherePolar::metric(const Vec& x) const {
  Mat g = Mat::Identity(2, 2);
  const double s = std::sin(x[0]);
  g(1, 1) = s * s;
  return g;
}

bool SpherePolar::in_chart(const Vec& x) const {
  return x.size() == 2 && x.allFinite() && x[0] > 1e-6 && x[0] < std::numbers::pi - 1e-6;
}

bool SpherePolar::in_cut_locus(const Vec& x, const Vec& y) const {
  auto embed = [](const Vec& p) {
    return Eigen::Vector3d(std::sin(p[0]) * std::cos(p[1]), std::sin(p[0]) * std::sin(p[1]),
                           std::cos(p[0]));
  };
  const Eigen::Vector3d a = embed(x), b = embed(y);
  return std::atan2(a.cross(b).norm(), a.dot(b)) >= std::numbers::pi - Sphere::kCutLocusMargin;
}

Vec SpherePolar::reference_point() const {
  Vec x(2);
  x << std::numbers::pi / 2.0, 0.0;
  return x;
}

double SpherePolar::convex_diameter() const { return std::numbers::pi / 2.0; }

// ---------------------------------------------------------- HyperbolicPlane

namespace {

double minkowski(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Eigen::Vector3d to_hyperboloid(const Vec& p) {
  const double x = p[0], y = p[1];
  const double r = x * x + y * y;
  return {(r + 1.0) / (2.0 * y), x / y, (r - 1.0) / (2.0 * y)};
}

// Pushforward of a chart tangent vector to the hyperboloid.
Eigen::Vector3d push_tangent(const Vec& p, const Vec& v) {
  const double x = p[0], y = p[1], y2 = y * y;
  const double dx0 = (x / y) * v[0] + ((y2 - x * x - 1.0) / (2.0 * y2)) * v[1];
  const double dx1 = v[0] / y - (x / y2) * v[1];
  const double dx2 = (x / y) * v[0] + ((y2 - x * x + 1.0) / (2.0 * y2)) * v[1];
  return {dx0, dx1, dx2};
}

Vec from_hyperboloid(const Eigen::Vector3d& q) {
  const double s = q[0] - q[2];
  Vec p(2);
  p << q[1] / s, 1.0 / s;
  return p;
}

Vec pull_tangent(const Eigen::Vector3d& q, const Eigen::Vector3d& w) {
  const double s = q[0] - q[2];
  const double ds = w[0] - w[2];
  Vec v(2);
  v << w[1] / s - q[1] * ds / (s * s), -ds / (s * s);
  return v;
}

}  // namespace

Mat HyperbolicPlane::metric(const Vec& x) const {
  return Mat::Identity(2, 2) / (x[1] * x[1]);
}

bool HyperbolicPlane::in_chart(const Vec& x) const {
  return x.size() == 2 && x.allFinite() && x[1] > 0.0;
}

Mat HyperbolicPlane::frame(const Vec& x) const { return x[1] * Mat::Identity(2, 2); }

Christoffel HyperbolicPlane::christoffel(const Vec& x) const {
  if (!in_chart(x)) fail(ErrorCode::OutOfChart, "hyperbolic: point outside chart domain");
  const double iy = 1.0 / x[1];
  Christoffel c;
  c.upper.assign(2, Mat::Zero(2, 2));
  c.upper[0](0, 1) = c.upper[0](1, 0) = -iy;
  c.upper[1](0, 0) = iy;
  c.upper[1](1, 1) = -iy;
  return c;
}

Vec HyperbolicPlane::exp_closed(const Vec& x, const Vec& v) const {
  const double n = v.norm() / x[1];
  if (n == 0.0) return x;
  const Eigen::Vector3d q = to_hyperboloid(x);
  const Eigen::Vector3d w = push_tangent(x, v);
  return from_hyperboloid(std::cosh(n) * q + sinhc(n) * w);
}

Vec HyperbolicPlane::log_closed(const Vec& x, const Vec& y) const {
  const double d = distance_closed(x, y);
  if (d == 0.0) return Vec::Zero(2);
  const Eigen::Vector3d q = to_hyperboloid(x), r = to_hyperboloid(y);
  const double c = -minkowski(q, r);
  const Vec w = pull_tangent(q, r - c * q);
  const double wn = w.norm() / x[1];
  return (d / wn) * w;
}

Vec HyperbolicPlane::transport_closed(const Vec& x, const Vec& y, const Vec& v) const {
  const Eigen::Vector3d q = to_hyperboloid(x), r = to_hyperboloid(y);
  const Eigen::Vector3d w = push_tangent(x, v);
  const double c = -minkowski(q, r);
  const Eigen::Vector3d moved = w + (minkowski(r, w) / (1.0 + c)) * (q + r);
  return pull_tangent(r, moved);
}

double HyperbolicPlane::distance_closed(const Vec& x, const Vec& y) const {
  const double chord = std::hypot(x[0] - y[0], x[1] - y[1]);
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(x[1] * y[1])));
}

std::optional<double> HyperbolicPlane::sectional_closed(const Vec&, const Vec&, const Vec&) const {
  return -1.0;
}

std::optional<double> HyperbolicPlane::normal_volume_density(const Vec&, const Vec& v) const {
  return sinhc(v.norm());
}

// --------------------------------------------------------------------- Spd2

namespace {

using Mat2 = Eigen::Matrix2d;

Mat2 to_mat2(const Vec& x) {
  Mat2 m;
  m << x[0], x[1], x[1], x[2];
  return m;
}

Vec to_vec3(const Mat2& m) {
  Vec v(3);
  v << m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1);
  return v;
}

template <class F>
Mat2 sym_apply(const Mat2& a, F f) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (a + a.transpose()));
  Eigen::Vector2d ev = es.eigenvalues();
  for (int i = 0; i < 2; ++i) ev[i] = f(ev[i]);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Mat2 sqrtm(const Mat2& a) { return sym_apply(a, [](double l) { return std::sqrt(l); }); }
Mat2 isqrtm(const Mat2& a) { return sym_apply(a, [](double l) { return 1.0 / std::sqrt(l); }); }
Mat2 expm(const Mat2& a) { return sym_apply(a, [](double l) { return std::exp(l); }); }
Mat2 logm(const Mat2& a) { return sym_apply(a, [](double l) { return std::log(l); }); }

Mat2 basis(int i) {
  Mat2 e = Mat2::Zero();
  if (i == 0) e(0, 0) = 1.0;
  if (i == 1) e(0, 1) = e(1, 0) = 1.0;
  if (i == 2) e(1, 1) = 1.0;
  return e;
}

}  // namespace

Mat Spd2::metric(const Vec& x) const {
  const Mat2 pinv = to_mat2(x).inverse();
  Mat g(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) g(i, j) = (pinv * basis(i) * pinv * basis(j)).trace();
  }
  return g;
}

bool Spd2::in_chart(const Vec& x) const {
  return x.size() == 3 && x.allFinite() && x[0] > 0.0 && x[0] * x[2] - x[1] * x[1] > 0.0;
}

Vec Spd2::reference_point() const {
  Vec x(3);
  x << 1.0, 0.0, 1.0;
  return x;
}

Christoffel Spd2::christoffel(const Vec& x) const {
  if (!in_chart(x)) fail(ErrorCode::OutOfChart, "spd2: point outside chart domain");
  const Mat2 pinv = to_mat2(x).inverse();
  Christoffel c;
  c.upper.assign(3, Mat::Zero(3, 3));
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      const Mat2 gjk = -0.5 * (basis(j) * pinv * basis(k) + basis(k) * pinv * basis(j));
      const Vec comps = to_vec3(gjk);
      for (int i = 0; i < 3; ++i) c.upper[static_cast<size_t>(i)](j, k) = comps[i];
    }
  }
  return c;
}

Vec Spd2::exp_closed(const Vec& x, const Vec& v) const {
  const Mat2 p = to_mat2(x);
  const Mat2 s = sqrtm(p), si = isqrtm(p);
  return to_vec3(s * expm(si * to_mat2(v) * si) * s);
}

Vec Spd2::log_closed(const Vec& x, const Vec& y) const {
  const Mat2 p = to_mat2(x);
  const Mat2 s = sqrtm(p), si = isqrtm(p);
  return to_vec3(s * logm(si * to_mat2(y) * si) * s);
}

Vec Spd2::transport_closed(const Vec& x, const Vec& y, const Vec& v) const {
  const Mat2 p = to_mat2(x);
  const Mat2 s = sqrtm(p), si = isqrtm(p);
  const Mat2 e = s * sqrtm(si * to_mat2(y) * si) * si;
  return to_vec3(e * to_mat2(v) * e.transpose());
}

double Spd2::distance_closed(const Vec& x, const Vec& y) const {
  const Mat2 si = isqrtm(to_mat2(x));
  return logm(si * to_mat2(y) * si).norm();
}

std::optional<double> Spd2::sectional_closed(const Vec& x, const Vec& u, const Vec& v) const {
  const Mat2 si = isqrtm(to_mat2(x));
  const Mat2 a = si * to_mat2(u) * si, b = si * to_mat2(v) * si;
  const Mat2 c = a * b - b * a;
  const double area = a.squaredNorm() * b.squaredNorm() - std::pow((a * b).trace(), 2);
  if (area <= 0.0) return std::nullopt;
  return -0.25 * c.squaredNorm() / area;
}

std::optional<double> Spd2::normal_volume_density(const Vec& x, const Vec& v) const {
  const Mat2 si = isqrtm(to_mat2(x));
  const Mat2 w = si * to_mat2(frame(x) * v) * si;
  Eigen::SelfAdjointEigenSolver<Mat2> es(w, Eigen::EigenvaluesOnly);
  const double half_gap = 0.5 * std::abs(es.eigenvalues()[1] - es.eigenvalues()[0]);
  return sinhc(half_gap);
}

// ------------------------------------------------------------------ factory

ManifoldPtr make_manifold(const std::string& name) {
  if (name == "euclidean") return std::make_shared<Euclidean>(2);
  if (name.rfind("euclidean", 0) == 0) {
    const std::string tail = name.substr(9);
    if (!tail.empty() && tail.find_first_not_of("0123456789") == std::string::npos) {
      return std::make_shared<Euclidean>(std::stoi(tail));
    }
  }
  if (name == "sphere") return std::make_shared<Sphere>();
  if (name == "sphere_polar") return std::make_shared<SpherePolar>();
  if (name == "hyperbolic") return std::make_shared<HyperbolicPlane>();
  if (name == "spd2") return std::make_shared<Spd2>();
  fail(ErrorCode::Config, "unknown manifold '" + name + "'");
}

std::vector<std::string> builtin_manifold_names() {
  return {"euclidean", "sphere", "sphere_polar", "hyperbolic", "spd2"};
}

}  // namespace mfe
