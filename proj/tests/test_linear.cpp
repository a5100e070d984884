#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "chemochip/chemochip.hpp"

using namespace chemochip;

namespace {
// Diagonally dominant tridiagonal matrix with a scaled off-diagonal.
SparseMatrix tridiag(int n, double off) {
  std::vector<Eigen::Triplet<double, int>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 4.0);
    if (i > 0) t.emplace_back(i, i - 1, off);
    if (i + 1 < n) t.emplace_back(i, i + 1, off);
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 g(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(g);
  return v;
}
}  // namespace

TEST(CachedSolver, IdentitySkipsFactorization) {
  CachedSparseSolver s;
  SparseMatrix I(5, 5);
  I.setIdentity();
  I.makeCompressed();
  const Eigen::VectorXd b = random_vector(5, 1);
  EXPECT_EQ(s.solve(I, b), b);
  EXPECT_EQ(s.factorizations(), 0u);
}

TEST(CachedSolver, ReusesIdenticalMatrix) {
  CachedSparseSolver s;
  const SparseMatrix A = tridiag(50, -1.0);
  for (unsigned k = 0; k < 3; ++k) {
    const Eigen::VectorXd b = random_vector(50, k);
    EXPECT_LT((A * s.solve(A, b) - b).lpNorm<Eigen::Infinity>(), 1e-14);
  }
  EXPECT_EQ(s.factorizations(), 1u);
}

TEST(CachedSolver, NearbyValuesUseDefectCorrection) {
  CachedSparseSolver s;
  s.solve(tridiag(50, -1.0), random_vector(50, 3));
  const SparseMatrix B = tridiag(50, -1.001);
  const Eigen::VectorXd b = random_vector(50, 4);
  const Eigen::VectorXd x = s.solve(B, b);
  EXPECT_LT((B * x - b).lpNorm<Eigen::Infinity>(), 1e-13);
  EXPECT_EQ(s.factorizations(), 1u);
}

TEST(CachedSolver, DistantValuesRefactor) {
  CachedSparseSolver s;
  s.solve(tridiag(50, -0.01), random_vector(50, 5));
  const SparseMatrix B = tridiag(50, -3.9);
  const Eigen::VectorXd b = random_vector(50, 6);
  const Eigen::VectorXd x = s.solve(B, b);
  EXPECT_LT((B * x - b).lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_EQ(s.factorizations(), 2u);
}

TEST(Relations, MatrixAndResidualSinksAgree) {
  // x0 = 0.5 x1 + 1, x1 = 0.25 x0 + 2
  auto emit = [](auto& s) {
    s.add(0, 1, 0.5);
    s.add_rhs(0, 1.0);
    s.add(1, 0, 0.25);
    s.add_rhs(1, 2.0);
  };
  const std::vector<double> x = solve_relations(2, emit);
  EXPECT_NEAR(x[0], 16.0 / 7.0, 1e-15);
  EXPECT_NEAR(x[1], 18.0 / 7.0, 1e-15);
  ResidualSink r(x);
  emit(r);
  EXPECT_NEAR(r.residual()[0], 0.0, 1e-15);
  EXPECT_NEAR(r.residual()[1], 0.0, 1e-15);
}

TEST(Relations, MixedLevelsSplitByWeight) {
  MatrixSink m(1);
  emit_mixed(m, 0, 0, 2.0, 3.0, 0.25);
  EXPECT_DOUBLE_EQ(m.rhs()[0], 0.75 * 2.0 * 3.0);
  ASSERT_EQ(m.entries().size(), 2u);
  EXPECT_DOUBLE_EQ(m.entries()[1].value, -0.5);
  ExplicitSink e(1);
  emit_mixed(e, 0, 0, 2.0, 3.0, 0.0);
  EXPECT_DOUBLE_EQ(e.values()[0], 6.0);
  EXPECT_THROW(emit_mixed(e, 0, 0, 2.0, 3.0, 0.5), std::logic_error);
}
