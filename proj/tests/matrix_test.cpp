#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include <graphlap/matrix.hpp>

using namespace graphlap;

namespace {

const auto kCircle = EmbeddedManifold::circle(1.0);
const auto kSphere = EmbeddedManifold::sphere(1.0);
const auto kTorus = EmbeddedManifold::torus(2.0, 0.5);

} // namespace

TEST(WeightMatrix, SinglePoint) {
  const Sample s = sample_uniform(kCircle, 1, 4);
  const auto W = weight_matrix(s, Bandwidth(0.5));
  ASSERT_EQ(W.w.rows(), 1);
  EXPECT_NEAR(W.w(0, 0), 0.28209479177387814 / std::pow(0.5, 3), 1e-15);
  const auto L = laplacian_matrices(W);
  EXPECT_EQ(L.unnormalized(0, 0), 0.0);
  EXPECT_NEAR(L.normalized(0, 0), 0.0, 1e-15);
  EXPECT_EQ(L.degrees(0), W.w(0, 0));
}

TEST(WeightMatrix, TwoPointsByHand) {
  const auto p = kSphere.at(0.0, 0.0), q = kSphere.at(0.0, 0.5);
  const Sample s{kSphere, 0, {p, q}};
  const double h = 0.4;
  const double scale = 1.0 / (2.0 * std::pow(h, 4));
  const double peak = 1.0 / (4 * M_PI);
  const double chord2 = 2.0 - 2.0 * std::cos(0.5);
  const double off = peak * std::exp(-chord2 / (4 * h * h)) * scale;
  const auto W = weight_matrix(s, Bandwidth(h));
  EXPECT_NEAR(W.w(0, 0), peak * scale, 1e-14);
  EXPECT_NEAR(W.w(0, 1), off, 1e-14);
  EXPECT_EQ(W.w(0, 1), W.w(1, 0));
  const auto L = laplacian_matrices(W);
  EXPECT_NEAR(L.unnormalized(0, 0), off, 1e-14);
  EXPECT_NEAR(L.unnormalized(0, 1), -off, 1e-14);
  const double deg = peak * scale + off;
  EXPECT_NEAR(L.degrees(1), deg, 1e-14);
  EXPECT_NEAR(L.normalized(0, 1), -off / deg, 1e-14);
  EXPECT_NEAR(L.normalized(0, 0), 1.0 - peak * scale / deg, 1e-14);
}

TEST(WeightMatrix, EmptySample) {
  EXPECT_THROW(weight_matrix(sample_uniform(kCircle, 0, 1), Bandwidth(0.1)), Error);
}

TEST(WeightMatrix, SymmetricAndPositiveAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto &m = seed % 3 == 0 ? kCircle : seed % 3 == 1 ? kSphere : kTorus;
    const auto W = weight_matrix(sample_uniform(m, 30, seed), Bandwidth(0.3));
    EXPECT_TRUE(W.w == W.w.transpose()) << seed;
    EXPECT_GT(W.w.minCoeff(), 0.0) << seed;
  }
}

TEST(Laplacian, RowSumsVanish) {
  for (const auto &m : {kCircle, kSphere, kTorus}) {
    const auto W = weight_matrix(sample_uniform(m, 200, 7), Bandwidth(0.2));
    const auto L = laplacian_matrices(W);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(200);
    EXPECT_LE((L.unnormalized * ones).cwiseAbs().maxCoeff(), 1e-14 * L.degrees.maxCoeff());
    const Eigen::VectorXd root = L.degrees.cwiseSqrt();
    EXPECT_LE((L.normalized * root).cwiseAbs().maxCoeff(), 1e-12 * root.maxCoeff());
    EXPECT_TRUE(L.unnormalized == L.unnormalized.transpose());
  }
}

TEST(Laplacian, SpectraArePositiveSemidefinite) {
  const auto W = weight_matrix(sample_uniform(kSphere, 150, 3), Bandwidth(0.3));
  const auto L = laplacian_matrices(W);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> un(L.unnormalized), nm(L.normalized);
  EXPECT_GE(un.eigenvalues().minCoeff(), -1e-12 * L.degrees.maxCoeff());
  EXPECT_GE(nm.eigenvalues().minCoeff(), -1e-12);
  EXPECT_LE(nm.eigenvalues().maxCoeff(), 2.0 + 1e-12);
}

TEST(Laplacian, MatchesPointwiseGraphLaplacian) {
  for (const auto &m : {kCircle, kSphere, kTorus}) {
    const Sample s = sample_uniform(m, 300, 19);
    const Bandwidth h(0.25);
    const auto L = laplacian_matrices(weight_matrix(s, h));
    const auto f = TestFunction::default_class(m).front();
    const auto values = evaluate_on(s, f);
    const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(values.data(), 300);
    const Eigen::VectorXd Lf = L.unnormalized * fv;
    const double scale = L.degrees.maxCoeff() * fv.cwiseAbs().maxCoeff();
    for (int i = 0; i < 300; ++i)
      EXPECT_NEAR(Lf(i), -graph_laplacian_at(s.points[i], s, f, h), 1e-10 * scale)
          << m.describe() << " row " << i;
  }
}

TEST(Laplacian, LiteralNormalizedForm) {
  const auto W = weight_matrix(sample_uniform(kTorus, 60, 2), Bandwidth(0.4));
  const auto L = laplacian_matrices(W, NormalizedForm::literal);
  Eigen::MatrixXd D = L.degrees.asDiagonal();
  Eigen::MatrixXd inv_sqrt = L.degrees.cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::MatrixXd expected =
      Eigen::MatrixXd::Identity(60, 60) - inv_sqrt * (D - W.w) * inv_sqrt;
  EXPECT_LE((L.normalized - expected).cwiseAbs().maxCoeff(), 1e-12);
  // the unnormalized matrix does not depend on the form
  EXPECT_TRUE(L.unnormalized == laplacian_matrices(W).unnormalized);
}
