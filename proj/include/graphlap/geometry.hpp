#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdint>
#include <string>
#include <vector>

#include "core.hpp"
#include "random.hpp"

namespace graphlap {

enum class ManifoldKind { circle, sphere, torus };

constexpr std::string_view to_string(ManifoldKind kind) {
  switch (kind) {
  case ManifoldKind::circle:
    return "circle";
  case ManifoldKind::sphere:
    return "sphere";
  case ManifoldKind::torus:
    return "torus";
  }
  return "unknown";
}

/// One of the analytic test manifolds, embedded in R^2 (circle) or R^3.
///
/// Parametrizations:
///   circle  (r cos t, r sin t)
///   sphere  (r sin(polar) cos(az), r sin(polar) sin(az), r cos(polar))
///   torus   ((R + r cos v) cos u, (R + r cos v) sin u, r sin v)
class EmbeddedManifold {
public:
  static EmbeddedManifold circle(double radius) {
    require_positive(radius, "circle radius");
    return EmbeddedManifold(ManifoldKind::circle, radius, 0.0);
  }

  static EmbeddedManifold sphere(double radius) {
    require_positive(radius, "sphere radius");
    return EmbeddedManifold(ManifoldKind::sphere, radius, 0.0);
  }

  static EmbeddedManifold torus(double major, double minor) {
    require_positive(minor, "torus minor radius");
    if (!(major > minor) || !std::isfinite(major))
      throw Error(ErrorKind::DomainError,
                  "torus requires major radius > minor radius > 0");
    return EmbeddedManifold(ManifoldKind::torus, minor, major);
  }

  ManifoldKind kind() const noexcept { return kind_; }
  int intrinsic_dim() const noexcept {
    return kind_ == ManifoldKind::circle ? 1 : 2;
  }
  int ambient_dim() const noexcept {
    return kind_ == ManifoldKind::circle ? 2 : 3;
  }
  /// Radius of circle/sphere; minor radius of the torus.
  double radius() const noexcept { return radius_; }
  /// Major radius of the torus, 0 otherwise.
  double major_radius() const noexcept { return major_; }
  bool has_geodesics() const noexcept { return kind_ != ManifoldKind::torus; }

  std::string describe() const {
    std::string s{to_string(kind_)};
    s += "(r=" + format_param(radius_);
    if (kind_ == ManifoldKind::torus)
      s += ",R=" + format_param(major_);
    return s + ")";
  }

  /// Point with the given intrinsic parameters. Angles are wrapped; the
  /// sphere's polar angle must lie in [0, pi].
  ManifoldPoint at(double a, double b = 0.0) const {
    ManifoldPoint p;
    switch (kind_) {
    case ManifoldKind::circle: {
      const double t = wrap_angle(a);
      p.intrinsic = {t, 0.0};
      p.ambient = Vec3(radius_ * std::cos(t), radius_ * std::sin(t), 0.0);
      break;
    }
    case ManifoldKind::sphere: {
      if (!(b >= 0.0 && b <= pi))
        throw Error(ErrorKind::DomainError, "polar angle outside [0, pi]");
      const double az = wrap_angle(a);
      p.intrinsic = {az, b};
      const double s = std::sin(b);
      p.ambient = Vec3(radius_ * s * std::cos(az), radius_ * s * std::sin(az),
                       radius_ * std::cos(b));
      break;
    }
    case ManifoldKind::torus: {
      const double u = wrap_angle(a);
      const double v = wrap_angle(b);
      p.intrinsic = {u, v};
      const double ring = major_ + radius_ * std::cos(v);
      p.ambient = Vec3(ring * std::cos(u), ring * std::sin(u),
                       radius_ * std::sin(v));
      break;
    }
    }
    return p;
  }

  /// Recovers intrinsic parameters from an ambient point assumed to lie on
  /// the manifold. The ambient coordinates are kept as given.
  ManifoldPoint from_ambient(const Vec3 &x) const {
    ManifoldPoint p;
    p.ambient = x;
    switch (kind_) {
    case ManifoldKind::circle:
      p.ambient.z() = 0.0;
      p.intrinsic = {wrap_angle(std::atan2(x.y(), x.x())), 0.0};
      break;
    case ManifoldKind::sphere:
      p.intrinsic = {wrap_angle(std::atan2(x.y(), x.x())),
                     std::atan2(std::hypot(x.x(), x.y()), x.z())};
      break;
    case ManifoldKind::torus: {
      const double rho = std::hypot(x.x(), x.y());
      p.intrinsic = {wrap_angle(std::atan2(x.y(), x.x())),
                     wrap_angle(std::atan2(x.z(), rho - major_))};
      break;
    }
    }
    return p;
  }

  /// Value of the implicit equation F(x) = 0, scaled to be dimensionless.
  double implicit_residual(const Vec3 &x) const {
    switch (kind_) {
    case ManifoldKind::circle:
      return (std::hypot(x.x(), x.y()) - radius_) / radius_ +
             std::abs(x.z()) / radius_;
    case ManifoldKind::sphere:
      return (x.norm() - radius_) / radius_;
    case ManifoldKind::torus: {
      const double rho = std::hypot(x.x(), x.y());
      return (std::hypot(rho - major_, x.z()) - radius_) / radius_;
    }
    }
    return 0.0;
  }

  bool contains(const Vec3 &x, double tol = 1e-9) const {
    return std::abs(implicit_residual(x)) <= tol;
  }

  /// Unit normal (in the ambient plane, for the circle).
  Vec3 unit_normal(const ManifoldPoint &p) const {
    switch (kind_) {
    case ManifoldKind::circle:
    case ManifoldKind::sphere:
      return p.ambient.normalized();
    case ManifoldKind::torus: {
      const double u = p.intrinsic[0], v = p.intrinsic[1];
      return Vec3(std::cos(v) * std::cos(u), std::cos(v) * std::sin(u),
                  std::sin(v));
    }
    }
    return Vec3::Zero();
  }

  /// Orthonormal basis of T_p(M), stored as columns (d of them used).
  Eigen::Matrix<double, 3, 2> tangent_frame(const ManifoldPoint &p) const {
    Eigen::Matrix<double, 3, 2> frame = Eigen::Matrix<double, 3, 2>::Zero();
    switch (kind_) {
    case ManifoldKind::circle: {
      const double t = p.intrinsic[0];
      frame.col(0) = Vec3(-std::sin(t), std::cos(t), 0.0);
      break;
    }
    case ManifoldKind::sphere: {
      const Vec3 n = p.ambient.normalized();
      // Any vector not parallel to n seeds Gram-Schmidt.
      const Vec3 seed = std::abs(n.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
      const Vec3 e1 = (seed - seed.dot(n) * n).normalized();
      frame.col(0) = e1;
      frame.col(1) = n.cross(e1);
      break;
    }
    case ManifoldKind::torus: {
      const double u = p.intrinsic[0], v = p.intrinsic[1];
      frame.col(0) = Vec3(-std::sin(u), std::cos(u), 0.0);
      frame.col(1) = Vec3(-std::sin(v) * std::cos(u),
                          -std::sin(v) * std::sin(u), std::cos(v));
      break;
    }
    }
    return frame;
  }

  friend bool operator==(const EmbeddedManifold &,
                         const EmbeddedManifold &) = default;

private:
  EmbeddedManifold(ManifoldKind kind, double radius, double major)
      : kind_(kind), radius_(radius), major_(major) {}

  static void require_positive(double v, const char *what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::DomainError,
                  std::string(what) + " must be positive and finite");
  }

  static std::string format_param(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  ManifoldKind kind_;
  double radius_;
  double major_;
};

/// Riemannian volume |mu| of the manifold.
inline double volume(const EmbeddedManifold &m) {
  switch (m.kind()) {
  case ManifoldKind::circle:
    return two_pi * m.radius();
  case ManifoldKind::sphere:
    return 4.0 * pi * m.radius() * m.radius();
  case ManifoldKind::torus:
    return 4.0 * pi * pi * m.major_radius() * m.radius();
  }
  return 0.0;
}

struct Sample {
  EmbeddedManifold manifold;
  std::uint64_t seed = 0;
  std::vector<ManifoldPoint> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
};

/// n i.i.d. points with law mu/|mu|; a pure function of (m, n, seed).
inline Sample sample_uniform(const EmbeddedManifold &m, std::size_t n,
                             std::uint64_t seed) {
  Sample s{m, seed, {}};
  s.points.reserve(n);
  RandomStream rng(seed);
  switch (m.kind()) {
  case ManifoldKind::circle:
    for (std::size_t i = 0; i < n; ++i)
      s.points.push_back(m.at(rng.uniform(0.0, two_pi)));
    break;
  case ManifoldKind::sphere:
    while (s.points.size() < n) {
      const Vec3 g(rng.normal(), rng.normal(), rng.normal());
      const double len = g.norm();
      if (!(len > 1e-300))
        continue;
      s.points.push_back(m.from_ambient(g * (m.radius() / len)));
    }
    break;
  case ManifoldKind::torus: {
    const double big = m.major_radius(), small = m.radius();
    while (s.points.size() < n) {
      const double u = rng.uniform(0.0, two_pi);
      double v = 0.0;
      // Accept v with probability (R + r cos v) / (R + r).
      do {
        v = rng.uniform(0.0, two_pi);
      } while (rng.uniform() * (big + small) > big + small * std::cos(v));
      s.points.push_back(m.at(u, v));
    }
    break;
  }
  }
  return s;
}

inline void require_geodesics(const EmbeddedManifold &m) {
  if (!m.has_geodesics())
    throw Error(ErrorKind::UnsupportedGeometry,
                "no closed-form geodesics on " + m.describe());
}

inline double geodesic_distance(const EmbeddedManifold &m,
                                const ManifoldPoint &p,
                                const ManifoldPoint &q) {
  require_geodesics(m);
  if (m.kind() == ManifoldKind::circle) {
    double dt = std::abs(p.intrinsic[0] - q.intrinsic[0]);
    dt = std::fmod(dt, two_pi);
    if (dt > pi)
      dt = two_pi - dt;
    return m.radius() * dt;
  }
  // atan2(|p x q|, p.q) is accurate for nearly coincident and nearly
  // antipodal points, unlike arccos of the normalized dot product.
  const double r = m.radius();
  return r * std::atan2(p.ambient.cross(q.ambient).norm(),
                        p.ambient.dot(q.ambient));
}

/// Exponential map E_p(v) for |v| < pi r.
inline ManifoldPoint exp_map(const EmbeddedManifold &m, const TangentVector &v) {
  require_geodesics(m);
  const double r = m.radius();
  const double len = v.components.norm();
  if (!(len < pi * r))
    throw Error(ErrorKind::DomainError,
                "tangent vector outside the injectivity radius");
  const ManifoldPoint &p = v.base;
  if (std::abs(v.components.dot(m.unit_normal(p))) > 1e-10 * (r + len))
    throw Error(ErrorKind::DomainError, "vector is not tangent at its base");
  if (len == 0.0)
    return p;
  if (m.kind() == ManifoldKind::circle) {
    const double dir = v.components.dot(m.tangent_frame(p).col(0)) >= 0.0
                           ? 1.0
                           : -1.0;
    return m.at(p.intrinsic[0] + dir * len / r);
  }
  const double angle = len / r;
  const Vec3 x =
      std::cos(angle) * p.ambient + (r * std::sin(angle) / len) * v.components;
  return m.from_ambient(x);
}

/// Density of the Riemannian volume element in normal coordinates at
/// geodesic radius rho.
inline double normal_volume_density(const EmbeddedManifold &m, double rho) {
  require_geodesics(m);
  if (!(rho >= 0.0 && rho < pi * m.radius()))
    throw Error(ErrorKind::DomainError, "radius outside [0, pi r)");
  if (m.kind() == ManifoldKind::circle)
    return 1.0;
  const double s = rho / m.radius();
  if (s < 1e-4)
    return 1.0 - s * s / 6.0 + s * s * s * s / 120.0;
  return std::sin(s) / s;
}

/// Regular parameter grid: `per_dim` nodes per angular dimension. On the
/// sphere the polar angle takes k*pi/per_dim (k = 0..per_dim, poles once).
inline std::vector<ManifoldPoint> parameter_grid(const EmbeddedManifold &m,
                                                 std::size_t per_dim) {
  if (per_dim == 0)
    throw Error(ErrorKind::EmptyInput, "grid needs at least one node");
  std::vector<ManifoldPoint> grid;
  const double step = two_pi / static_cast<double>(per_dim);
  switch (m.kind()) {
  case ManifoldKind::circle:
    for (std::size_t i = 0; i < per_dim; ++i)
      grid.push_back(m.at(step * static_cast<double>(i)));
    break;
  case ManifoldKind::sphere:
    grid.push_back(m.at(0.0, 0.0));
    for (std::size_t k = 1; k < per_dim; ++k) {
      const double polar = pi * static_cast<double>(k) /
                           static_cast<double>(per_dim);
      for (std::size_t i = 0; i < per_dim; ++i)
        grid.push_back(m.at(step * static_cast<double>(i), polar));
    }
    grid.push_back(m.at(0.0, pi));
    break;
  case ManifoldKind::torus:
    for (std::size_t j = 0; j < per_dim; ++j)
      for (std::size_t i = 0; i < per_dim; ++i)
        grid.push_back(m.at(step * static_cast<double>(i),
                            step * static_cast<double>(j)));
    break;
  }
  return grid;
}

} // namespace graphlap
