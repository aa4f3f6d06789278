#pragma once

#include <Eigen/Dense>

#include "estimator.hpp"

namespace graphlap {

/// Dense Gaussian weights w_ij = K((X_i - X_j) / h) / (n h^{d+2}), diagonal
/// included. With this scaling (L f)_i = -graph_laplacian(f)(X_i) exactly in
/// exact arithmetic.
struct WeightMatrix {
  Eigen::MatrixXd w;
  double h = 0.0;
  int intrinsic_dim = 1;
};

inline WeightMatrix weight_matrix(const Sample &sample, Bandwidth h) {
  if (sample.empty())
    throw Error(ErrorKind::EmptySample, "weight matrix of an empty sample");
  const auto n = static_cast<Eigen::Index>(sample.size());
  const KernelSpec kernel = kernel_for(sample.manifold);
  const int d = sample.manifold.intrinsic_dim();
  const double scale =
      1.0 / (static_cast<double>(n) * h.laplacian_scale(d));
  const double inv_h2 = 1.0 / (h.value() * h.value());

  WeightMatrix out{Eigen::MatrixXd(n, n), h.value(), d};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.w(i, i) = kernel.peak() * scale;
    const Vec3 &xi = sample.points[static_cast<std::size_t>(i)].ambient;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vec3 &xj = sample.points[static_cast<std::size_t>(j)].ambient;
      const double v =
          kernel.from_squared_norm((xi - xj).squaredNorm() * inv_h2) * scale;
      out.w(i, j) = v;
      out.w(j, i) = v;
    }
  }
  return out;
}

enum class NormalizedForm {
  /// I - D^{-1/2} W D^{-1/2}
  conventional,
  /// I - D^{-1/2} L D^{-1/2}, the variant with L in place of W
  literal,
};

struct LaplacianMatrices {
  Eigen::MatrixXd unnormalized; // L = D - W
  Eigen::MatrixXd normalized;
  Eigen::VectorXd degrees;
};

/// L = D - W with D = diag(row sums of W), plus a normalized counterpart.
/// Self-weights count towards the degrees, so every degree is positive.
inline LaplacianMatrices
laplacian_matrices(const WeightMatrix &W,
                   NormalizedForm form = NormalizedForm::conventional) {
  const Eigen::Index n = W.w.rows();
  LaplacianMatrices out;
  out.degrees = W.w.rowwise().sum();
  out.unnormalized = -W.w;
  for (Eigen::Index i = 0; i < n; ++i) {
    // Off-diagonal row sum makes L 1 = 0 hold to roundoff even when the
    // diagonal weight dominates.
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i)
        off += W.w(i, j);
    out.unnormalized(i, i) = off;
  }
  const Eigen::VectorXd inv_sqrt = out.degrees.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd &inner =
      form == NormalizedForm::conventional ? W.w : out.unnormalized;
  out.normalized = -(inv_sqrt.asDiagonal() * inner * inv_sqrt.asDiagonal());
  out.normalized.diagonal().array() += 1.0;
  return out;
}

} // namespace graphlap
