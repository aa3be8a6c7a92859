#include <gtest/gtest.h>

#include <random>

#include "dissipgate/hilbert.hpp"

namespace dg = dissipgate;
using dg::Complex;
using dg::Matrix;

namespace {

Matrix random_density(int n, std::mt19937& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = Complex(nd(rng), nd(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

}  // namespace

TEST(Hilbert, SpaceTotal) {
  EXPECT_EQ((dg::Space{{3, 3, 3}}).total(), 27);
  EXPECT_EQ((dg::Space{{4, 4, 3}}).total(), 48);
  EXPECT_EQ((dg::Space{{4, 4, 3, 3}}).total(), 144);
  EXPECT_THROW((dg::Space{{2, 0}}).total(), std::invalid_argument);
}

TEST(Hilbert, EmbedIdentityIsIdentity) {
  dg::Space sp{{2, 2}};
  auto op = dg::embed(Matrix::Identity(2, 2), 0, sp);
  EXPECT_NEAR((op.mat - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.0,
              1e-15);
}

TEST(Hilbert, EmbedRaisesSecondLeg) {
  // |1><0| on leg 1 of [2,2] maps |00> (index 0) to |01> (index 1):
  // leg 0 is the slow index.
  dg::Space sp{{2, 2}};
  auto raise = dg::transition(1, 0, 2);
  auto op = dg::embed(raise, 1, sp);
  Eigen::VectorXcd v00 = Eigen::VectorXcd::Zero(4);
  v00(0) = 1.0;
  Eigen::VectorXcd out = op.mat * v00;
  EXPECT_NEAR(std::abs(out(1) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(out.cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(Hilbert, EmbeddedOperatorsOnDistinctLegsCommute) {
  dg::Space sp{{3, 3, 3}};
  auto a = dg::embed(dg::annihilation(3).mat, 2, sp);
  auto s = dg::embed(dg::transition(2, 0, 3).mat, 0, sp);
  EXPECT_NEAR((a.mat * s.mat - s.mat * a.mat).cwiseAbs().maxCoeff(), 0.0,
              1e-14);
}

TEST(Hilbert, AnnihilationTwoLevel) {
  auto a = dg::annihilation(2);
  EXPECT_NEAR(std::abs(a.mat(0, 1) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a.mat(0, 0)) + std::abs(a.mat(1, 0)) +
                  std::abs(a.mat(1, 1)),
              0.0, 1e-15);
}

TEST(Hilbert, AnnihilationLadderAndCommutator) {
  auto a = dg::annihilation(3);
  Matrix n = a.mat.adjoint() * a.mat;
  for (int k = 0; k < 3; ++k)
    EXPECT_NEAR(std::abs(n(k, k) - static_cast<double>(k)), 0.0, 1e-14);
  // Truncated [a, a^dag] = diag(1, 1, 1-d).
  Matrix comm = a.mat * a.mat.adjoint() - a.mat.adjoint() * a.mat;
  EXPECT_NEAR(std::abs(comm(0, 0) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(comm(1, 1) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(comm(2, 2) + 2.0), 0.0, 1e-14);
  EXPECT_THROW(dg::annihilation(1), std::invalid_argument);
}

TEST(Hilbert, NumberOperatorSpectrumOnProductSpace) {
  // a^dag a embedded in [3,3,3] has eigenvalues {0,1,2}, each 9-fold.
  dg::Space sp{{3, 3, 3}};
  auto a = dg::embed(dg::annihilation(3).mat, 2, sp);
  Matrix n = a.mat.adjoint() * a.mat;
  Eigen::SelfAdjointEigenSolver<Matrix> es(n, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  for (int k = 0; k < 27; ++k)
    EXPECT_NEAR(ev(k) - static_cast<double>(k / 9), 0.0, 1e-12);
}

TEST(Hilbert, TransitionBounds) {
  auto t = dg::transition(2, 0, 4);
  EXPECT_NEAR(std::abs(t.mat(2, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(t.mat.cwiseAbs().sum(), 1.0, 1e-15);
  EXPECT_THROW(dg::transition(4, 0, 4), std::invalid_argument);
  EXPECT_THROW(dg::transition(0, -1, 4), std::invalid_argument);
}

TEST(Hilbert, BasisIndexRowMajor) {
  // index(i1, i2, n) = (i1*3 + i2)*fock + n for [3,3,3].
  dg::Space sp{{3, 3, 3}};
  EXPECT_EQ(dg::basis_index(sp, {0, 0, 0}), 0);
  EXPECT_EQ(dg::basis_index(sp, {0, 0, 2}), 2);
  EXPECT_EQ(dg::basis_index(sp, {0, 1, 0}), 3);
  EXPECT_EQ(dg::basis_index(sp, {1, 0, 0}), 9);
  EXPECT_EQ(dg::basis_index(sp, {2, 2, 2}), 26);
  EXPECT_THROW(dg::basis_index(sp, {3, 0, 0}), std::invalid_argument);
  EXPECT_THROW(dg::basis_index(sp, {0, 0}), std::invalid_argument);
}

TEST(Hilbert, BasisStateIsValidDensity) {
  dg::Space sp{{4, 4, 3}};
  auto rho = dg::basis_state(sp, {3, 1, 0});
  EXPECT_NO_THROW(rho.validate());
  EXPECT_NEAR(std::abs(rho.mat(dg::basis_index(sp, {3, 1, 0}),
                               dg::basis_index(sp, {3, 1, 0})) -
                       1.0),
              0.0, 1e-15);
}

TEST(Hilbert, PartialTraceProductState) {
  dg::Space sp{{2, 3}};
  Matrix rho_a = Matrix::Zero(2, 2);
  rho_a(0, 0) = 0.25;
  rho_a(1, 1) = 0.75;
  Matrix rho_b = Matrix::Zero(3, 3);
  rho_b(0, 0) = 0.5;
  rho_b(2, 2) = 0.5;
  rho_b(0, 2) = 0.1;
  rho_b(2, 0) = 0.1;
  dg::DensityMatrix rho{sp, dg::kron(rho_a, rho_b)};
  auto ra = dg::partial_trace(rho, {0});
  auto rb = dg::partial_trace(rho, {1});
  EXPECT_NEAR((ra.mat - rho_a).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  EXPECT_NEAR((rb.mat - rho_b).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(Hilbert, PartialTraceBellState) {
  // Tracing either leg of a Bell pair leaves the maximally mixed qubit.
  dg::Space sp{{2, 2}};
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell(0) = 1.0 / std::sqrt(2.0);
  bell(3) = 1.0 / std::sqrt(2.0);
  dg::DensityMatrix rho{sp, bell * bell.adjoint()};
  for (int leg : {0, 1}) {
    auto r = dg::partial_trace(rho, {leg});
    EXPECT_NEAR((r.mat - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(),
                0.0, 1e-14);
  }
}

TEST(Hilbert, PartialTracePreservesTraceAndPositivity) {
  dg::Space sp{{3, 3, 3}};
  std::mt19937 rng(20260815);
  for (int trial = 0; trial < 5; ++trial) {
    dg::DensityMatrix rho{sp, random_density(27, rng)};
    for (const auto& keep :
         std::vector<std::vector<int>>{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}}) {
      auto r = dg::partial_trace(rho, keep);
      EXPECT_NEAR(std::abs(r.mat.trace() - Complex(1.0, 0.0)), 0.0, 1e-12);
      EXPECT_NO_THROW(r.validate(1e-10, 1e-8, -1e-10));
    }
  }
}

TEST(Hilbert, PartialTraceKeepAllIsIdentityMap) {
  dg::Space sp{{2, 2}};
  std::mt19937 rng(7);
  dg::DensityMatrix rho{sp, random_density(4, rng)};
  auto r = dg::partial_trace(rho, {0, 1});
  EXPECT_NEAR((r.mat - rho.mat).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(Hilbert, PartialTraceArgumentChecks) {
  dg::Space sp{{2, 2}};
  std::mt19937 rng(11);
  dg::DensityMatrix rho{sp, random_density(4, rng)};
  EXPECT_THROW(dg::partial_trace(rho, {}), std::invalid_argument);
  EXPECT_THROW(dg::partial_trace(rho, {1, 0}), std::invalid_argument);
  EXPECT_THROW(dg::partial_trace(rho, {0, 2}), std::invalid_argument);
}

TEST(Hilbert, ValidateRejectsBadStates) {
  dg::Space sp{{2}};
  Matrix notherm = Matrix::Zero(2, 2);
  notherm(0, 0) = 1.0;
  notherm(0, 1) = Complex(0.0, 0.5);
  EXPECT_THROW((dg::DensityMatrix{sp, notherm}).validate(),
               std::invalid_argument);

  Matrix badtrace = 2.0 * Matrix::Identity(2, 2);
  EXPECT_THROW((dg::DensityMatrix{sp, badtrace}).validate(),
               std::invalid_argument);

  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  EXPECT_THROW((dg::DensityMatrix{sp, negative}).validate(),
               std::invalid_argument);
}

TEST(Hilbert, EmbedDimensionMismatchThrows) {
  dg::Space sp{{3, 3, 3}};
  EXPECT_THROW(dg::embed(Matrix::Identity(2, 2), 0, sp),
               std::invalid_argument);
  EXPECT_THROW(dg::embed(Matrix::Identity(3, 3), 3, sp),
               std::invalid_argument);
}
