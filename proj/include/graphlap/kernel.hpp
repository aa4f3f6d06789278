#pragma once

#include <cmath>

#include "core.hpp"

namespace graphlap {

/// Gaussian kernel K(x) = (4 pi)^{-d/2} exp(-|x|^2 / 4) on R^m. The
/// normalization uses the intrinsic dimension d while the argument lives in
/// the ambient space, so that K integrates to one over R^d.
class KernelSpec {
public:
  KernelSpec(int intrinsic_dim, int ambient_dim)
      : d_(intrinsic_dim), m_(ambient_dim) {
    if (d_ < 1 || m_ < d_)
      throw Error(ErrorKind::InvalidArgument,
                  "kernel needs 1 <= intrinsic dim <= ambient dim");
    norm_ = std::pow(4.0 * pi, -0.5 * d_);
  }

  int intrinsic_dim() const noexcept { return d_; }
  int ambient_dim() const noexcept { return m_; }

  /// K(0) = (4 pi)^{-d/2}.
  double peak() const noexcept { return norm_; }

  /// K evaluated at a vector of squared norm `sq_norm`.
  double from_squared_norm(double sq_norm) const noexcept {
    return norm_ * std::exp(-0.25 * sq_norm);
  }

  template <class Derived>
  double operator()(const Eigen::MatrixBase<Derived> &x) const {
    return from_squared_norm(x.squaredNorm());
  }

private:
  int d_;
  int m_;
  double norm_;
};

template <class Derived>
double gaussian_kernel(const KernelSpec &spec,
                       const Eigen::MatrixBase<Derived> &x) {
  return spec(x);
}

/// Positive, finite kernel bandwidth h.
class Bandwidth {
public:
  explicit Bandwidth(double h) : h_(h) {
    if (!(h > 0.0) || !std::isfinite(h))
      throw Error(ErrorKind::NonpositiveBandwidth,
                  "bandwidth must be positive and finite");
  }

  double value() const noexcept { return h_; }

  /// h^{d+2}, the normalization of the Laplacian estimators.
  double laplacian_scale(int d) const { return std::pow(h_, d + 2); }

private:
  double h_;
};

} // namespace graphlap
