#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "estimator.hpp"

namespace graphlap {

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline GaussLegendreRule gauss_legendre(std::size_t n) {
  if (n == 0)
    throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre needs n >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (nn + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = nn * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : nn * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = x;
    rule.nodes[n - 1 - i] = -x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.nodes[n / 2] = 0.0;
  return rule;
}

struct QuadratureSpec {
  /// Successive refinements must agree to rel_tol_per_h * h (relative).
  double rel_tol_per_h = 1e-4;
  std::size_t max_nodes = std::size_t{1} << 20;
};

struct AveragingResult {
  double value = 0.0;
  std::size_t nodes = 0; // nodes of the accepted (finest) rule
};

namespace detail {

struct QuadratureEstimate {
  double value = 0.0;
  double abs_value = 0.0; // same rule applied to |integrand|
};

inline std::size_t next_pow2(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x)
    n <<= 1;
  return n;
}

template <PointFunction F> class AveragingIntegrand {
public:
  AveragingIntegrand(const ManifoldPoint &p, const F &f, Bandwidth h,
                     const EmbeddedManifold &m)
      : p_(p), f_(f), f_p_(f(p)), kernel_(kernel_for(m)),
        inv_h2_(1.0 / (h.value() * h.value())),
        scale_(1.0 / h.laplacian_scale(m.intrinsic_dim())) {}

  double operator()(const ManifoldPoint &x) const {
    const double diff = f_(x) - f_p_;
    if (diff == 0.0)
      return 0.0;
    return scale_ *
           kernel_.from_squared_norm((p_.ambient - x.ambient).squaredNorm() *
                                     inv_h2_) *
           diff;
  }

private:
  const ManifoldPoint &p_;
  const F &f_;
  double f_p_;
  KernelSpec kernel_;
  double inv_h2_;
  double scale_;
};

// Trapezoid in theta, nodes anchored at p. Weights 1/N (law dtheta / 2 pi).
template <class G>
QuadratureEstimate circle_rule(const EmbeddedManifold &m, const ManifoldPoint &p,
                               const G &g, std::size_t n) {
  QuadratureEstimate e;
  const double step = two_pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = g(m.at(p.intrinsic[0] + step * static_cast<double>(k)));
    e.value += v;
    e.abs_value += std::abs(v);
  }
  e.value /= static_cast<double>(n);
  e.abs_value /= static_cast<double>(n);
  return e;
}

// Polar coordinates about p: Gauss-Legendre in t = cos(angle to p),
// trapezoid in the azimuth around p. Law: dt dphi / (4 pi).
template <class G>
QuadratureEstimate sphere_rule(const EmbeddedManifold &m, const ManifoldPoint &p,
                               const G &g, std::size_t n_t, std::size_t n_phi) {
  const auto frame = m.tangent_frame(p);
  const Vec3 axis = p.ambient.normalized();
  const Vec3 e1 = frame.col(0), e2 = frame.col(1);
  const double r = m.radius();
  const auto rule = gauss_legendre(n_t);
  const double dphi = two_pi / static_cast<double>(n_phi);
  QuadratureEstimate e;
  for (std::size_t i = 0; i < n_t; ++i) {
    const double t = rule.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    double ring = 0.0, ring_abs = 0.0;
    for (std::size_t j = 0; j < n_phi; ++j) {
      const double phi = dphi * static_cast<double>(j);
      const Vec3 x =
          r * (s * std::cos(phi) * e1 + s * std::sin(phi) * e2 + t * axis);
      const double v = g(m.from_ambient(x));
      ring += v;
      ring_abs += std::abs(v);
    }
    e.value += rule.weights[i] * ring;
    e.abs_value += rule.weights[i] * ring_abs;
  }
  const double norm = dphi / (4.0 * pi);
  e.value *= norm;
  e.abs_value *= norm;
  return e;
}

// Periodic trapezoid in (u, v) anchored at p with surface weight
// (R + r cos v) r; law du dv (R + r cos v) / (4 pi^2 R).
template <class G>
QuadratureEstimate torus_rule(const EmbeddedManifold &m, const ManifoldPoint &p,
                              const G &g, std::size_t n_u, std::size_t n_v) {
  const double big = m.major_radius(), small = m.radius();
  const double du = two_pi / static_cast<double>(n_u);
  const double dv = two_pi / static_cast<double>(n_v);
  QuadratureEstimate e;
  for (std::size_t j = 0; j < n_v; ++j) {
    const double v = p.intrinsic[1] + dv * static_cast<double>(j);
    const double w = (big + small * std::cos(v)) / big;
    double row = 0.0, row_abs = 0.0;
    for (std::size_t i = 0; i < n_u; ++i) {
      const double val = g(m.at(p.intrinsic[0] + du * static_cast<double>(i), v));
      row += val;
      row_abs += std::abs(val);
    }
    e.value += w * row;
    e.abs_value += w * row_abs;
  }
  const double norm = 1.0 / (static_cast<double>(n_u) * static_cast<double>(n_v));
  e.value *= norm;
  e.abs_value *= norm;
  return e;
}

} // namespace detail

/// Averaging kernel operator
///
///   h^{-(d+2)} E[K((p - X) / h) (f(X) - f(p))],  X ~ mu / |mu|,
///
/// by deterministic quadrature refined (all node counts doubled) until two
/// successive values agree to quad.rel_tol_per_h * h relative. The initial
/// rule already resolves the kernel (node spacing at most h along M).
template <PointFunction F>
AveragingResult averaging_operator(const ManifoldPoint &p, const F &f,
                                   Bandwidth h, const EmbeddedManifold &m,
                                   const QuadratureSpec &quad = {}) {
  if (!m.contains(p.ambient, 1e-8))
    throw Error(ErrorKind::ManifoldMismatch,
                "point does not lie on " + m.describe());
  if constexpr (std::same_as<F, TestFunction>) {
    if (!(f.manifold() == m))
      throw Error(ErrorKind::ManifoldMismatch,
                  "function does not live on " + m.describe());
  }
  const detail::AveragingIntegrand<F> g(p, f, h, m);
  const double hv = h.value();
  const double tol = quad.rel_tol_per_h * hv;

  // dims[0], dims[1]: node counts per direction (dims[1] unused on circle)
  std::size_t dims[2] = {0, 1};
  switch (m.kind()) {
  case ManifoldKind::circle:
    dims[0] = std::max<std::size_t>(64, detail::next_pow2(two_pi * m.radius() / hv));
    break;
  case ManifoldKind::sphere:
    dims[0] = std::max<std::size_t>(32, detail::next_pow2(two_pi * m.radius() / hv));
    dims[1] = 16;
    break;
  case ManifoldKind::torus:
    dims[0] = std::max<std::size_t>(
        32, detail::next_pow2(two_pi * (m.major_radius() + m.radius()) / hv));
    dims[1] = std::max<std::size_t>(32, detail::next_pow2(two_pi * m.radius() / hv));
    break;
  }

  auto evaluate = [&](const std::size_t (&n)[2]) {
    switch (m.kind()) {
    case ManifoldKind::circle:
      return detail::circle_rule(m, p, g, n[0]);
    case ManifoldKind::sphere:
      return detail::sphere_rule(m, p, g, n[0], n[1]);
    case ManifoldKind::torus:
      return detail::torus_rule(m, p, g, n[0], n[1]);
    }
    return detail::QuadratureEstimate{};
  };

  auto total = [&] { return dims[0] * dims[1]; };
  if (total() > quad.max_nodes)
    throw Error(ErrorKind::QuadratureNotConverged,
                "initial quadrature rule exceeds the node cap");
  detail::QuadratureEstimate previous = evaluate(dims);
  while (true) {
    dims[0] *= 2;
    if (m.kind() != ManifoldKind::circle)
      dims[1] *= 2;
    if (total() > quad.max_nodes)
      throw Error(ErrorKind::QuadratureNotConverged,
                  "averaging operator quadrature exceeded the node cap");
    const detail::QuadratureEstimate current = evaluate(dims);
    const double change = std::abs(current.value - previous.value);
    // The second clause is the roundoff floor for integrals that vanish by
    // symmetry (odd integrands, constants).
    if (change <= tol * std::abs(current.value) ||
        change <= 1e-13 * current.abs_value)
      return {current.value, total()};
    previous = current;
  }
}

} // namespace graphlap
