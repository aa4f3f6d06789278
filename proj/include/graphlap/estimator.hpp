#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "kernel.hpp"
#include "reproducible_sum.hpp"
#include "test_function.hpp"

namespace graphlap {

template <class F>
concept PointFunction = std::invocable<const F &, const ManifoldPoint &>;

inline KernelSpec kernel_for(const EmbeddedManifold &m) {
  return KernelSpec(m.intrinsic_dim(), m.ambient_dim());
}

/// Empirical graph Laplacian from precomputed values f(X_i):
///
///   (1 / (n h^{d+2})) sum_i K((p - X_i) / h) (f(X_i) - f(p))
///
/// The sum is order independent, so permuting the sample (together with the
/// values) leaves the result bit-identical.
inline double graph_laplacian_from_values(const Vec3 &p, double f_p,
                                          const Sample &sample,
                                          std::span<const double> values,
                                          Bandwidth h) {
  if (sample.empty())
    throw Error(ErrorKind::EmptySample, "graph Laplacian of an empty sample");
  if (values.size() != sample.size())
    throw Error(ErrorKind::InvalidArgument, "one value per sample point needed");
  const KernelSpec kernel = kernel_for(sample.manifold);
  const double inv_h2 = 1.0 / (h.value() * h.value());

  thread_local std::vector<double> terms;
  terms.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double diff = values[i] - f_p;
    terms[i] = diff == 0.0
                   ? 0.0
                   : kernel.from_squared_norm(
                         (p - sample.points[i].ambient).squaredNorm() * inv_h2) *
                         diff;
  }
  const double n = static_cast<double>(sample.size());
  return detail::reproducible_sum(terms) /
         (n * h.laplacian_scale(sample.manifold.intrinsic_dim()));
}

/// f evaluated at every sample point.
template <PointFunction F>
std::vector<double> evaluate_on(const Sample &sample, const F &f) {
  std::vector<double> values;
  values.reserve(sample.size());
  for (const auto &x : sample.points)
    values.push_back(f(x));
  return values;
}

/// Empirical graph Laplacian of f at p over the sample, using ambient
/// differences p - X_i.
template <PointFunction F>
double graph_laplacian_at(const ManifoldPoint &p, const Sample &sample,
                          const F &f, Bandwidth h) {
  if (sample.empty())
    throw Error(ErrorKind::EmptySample, "graph Laplacian of an empty sample");
  if constexpr (std::same_as<F, TestFunction>) {
    if (!(f.manifold() == sample.manifold))
      throw Error(ErrorKind::ManifoldMismatch,
                  "function and sample live on different manifolds");
  }
  const auto values = evaluate_on(sample, f);
  return graph_laplacian_from_values(p.ambient, f(p), sample, values, h);
}

/// Limiting variance s^2 of sqrt(n h^{d+2}) (graph Laplacian - target):
///
///   s^2 = |grad f(p)|^2 / (2^d (2 pi)^{d/2} |mu|)
inline double clt_variance(const TestFunction &f, const EmbeddedManifold &m,
                           const ManifoldPoint &p) {
  if (!(f.manifold() == m))
    throw Error(ErrorKind::ManifoldMismatch,
                "function does not live on " + m.describe());
  const int d = m.intrinsic_dim();
  const double grad_sq = f.analytic(p).grad_norm_sq;
  return grad_sq /
         (std::pow(2.0, d) * std::pow(two_pi, 0.5 * d) * volume(m));
}

/// Law-of-the-logarithm constant
///
///   sup_{f, q} |grad f(q)| / (2^{d/2} (2 pi)^{d/4} |mu|^{1/2})
///
/// with the sup over M replaced by a max over the supplied grid.
inline double lol_constant(std::span<const TestFunction> functions,
                           const EmbeddedManifold &m,
                           std::span<const ManifoldPoint> grid) {
  if (functions.empty() || grid.empty())
    throw Error(ErrorKind::EmptyInput,
                "law-of-logarithm constant needs functions and grid points");
  double best = 0.0;
  for (const auto &f : functions) {
    if (!(f.manifold() == m))
      throw Error(ErrorKind::ManifoldMismatch,
                  "function does not live on " + m.describe());
    for (const auto &q : grid)
      best = std::max(best, f.analytic(q).grad_norm_sq);
  }
  const int d = m.intrinsic_dim();
  return std::sqrt(best) / (std::pow(2.0, 0.5 * d) *
                            std::pow(two_pi, 0.25 * d) * std::sqrt(volume(m)));
}

} // namespace graphlap
