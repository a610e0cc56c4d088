#include "ffkyp/sdp.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

using namespace ffkyp;
using ffkyp::testing::random_matrix;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

CMatrix random_hermitian(std::mt19937& rng, int n) {
  CMatrix h = random_matrix(rng, n, n).cast<Complex>() + Complex(0, 1) * random_matrix(rng, n, n).cast<Complex>();
  return 0.5 * (h + h.adjoint());
}

// Fresh blockwise eigensolve, independent of max_eig_neg.
double fresh_min_eig(const AffineSymmetricForm& f, const Vector& x) {
  double m = std::numeric_limits<double>::infinity();
  for (int b = 0; b < f.num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(f.block_value(b, x), Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

// Random LMI that is feasible by construction: F(x0) = S with S > 0.
AffineSymmetricForm planted_form(std::mt19937& rng, int vars, int size, Vector& x0) {
  AffineSymmetricForm f(vars);
  x0 = random_matrix(rng, vars, 1);
  for (int b = 0; b < 2; ++b) {
    std::vector<std::pair<int, Matrix>> terms;
    Matrix at_x0 = Matrix::Zero(size, size);
    for (int i = 0; i < vars; ++i) {
      Matrix c = random_matrix(rng, size, size);
      c = 0.5 * (c + c.transpose());
      terms.emplace_back(i, c);
      at_x0 += x0(i) * c;
    }
    Matrix s = random_matrix(rng, size, size);
    s = s * s.transpose() + 0.1 * Matrix::Identity(size, size);
    f.add_block(s - at_x0, terms);
  }
  return f;
}

}  // namespace

TEST(SymmetricCoordinates, IndexAndBasis) {
  EXPECT_EQ(sym_dim(1), 1);
  EXPECT_EQ(sym_dim(3), 6);
  std::vector<int> seen;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) seen.push_back(sym_index(3, i, j));
  std::sort(seen.begin(), seen.end());
  for (int k = 0; k < 6; ++k) EXPECT_EQ(seen[static_cast<std::size_t>(k)], k);
  Vector v(6);
  v << 1, 2, 3, 4, 5, 6;
  const Matrix m = sym_from_vector(3, v);
  EXPECT_TRUE(m.isApprox(m.transpose()));
  Matrix sum = Matrix::Zero(3, 3);
  for (int k = 0; k < 6; ++k) sum += v(k) * sym_basis(3, k);
  EXPECT_TRUE(sum.isApprox(m));
}

TEST(AffineSymmetricForm, BlockEvaluation) {
  AffineSymmetricForm f(2);
  f.add_block(scalar(-1.0), {{0, scalar(1.0)}});
  f.add_block(Matrix::Identity(2, 2), {{1, Matrix::Identity(2, 2)}, {1, Matrix::Identity(2, 2)}});
  EXPECT_EQ(f.num_blocks(), 2);
  EXPECT_EQ(f.total_size(), 3);
  Vector x(2);
  x << 3.0, 0.5;
  EXPECT_DOUBLE_EQ(f.block_value(0, x)(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(f.block_value(1, x)(1, 1), 2.0);
  EXPECT_EQ(f.coefficient_block(0, 1), nullptr);
  EXPECT_NEAR(max_eig_neg(f, x), -2.0, 1e-12);
}

TEST(AffineSymmetricForm, SymmetrizesAndChecksIndices) {
  AffineSymmetricForm f(1);
  Matrix a(2, 2);
  a << 1, 2, 4, 4;
  f.add_block(a);
  EXPECT_DOUBLE_EQ(f.constant_block(0)(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(f.constant_block(0)(1, 0), 3.0);
  EXPECT_THROW(f.add_block(Matrix::Zero(2, 3)), std::invalid_argument);
  EXPECT_THROW(f.add_block(scalar(1.0), {{3, scalar(1.0)}}), std::out_of_range);
}

TEST(SolveFeasibility, ScalarFeasible) {
  AffineSymmetricForm f(1);
  f.add_block(scalar(-1.0), {{0, scalar(1.0)}});
  f.add_block(scalar(3.0), {{0, scalar(-1.0)}});
  SolverOptions o;
  o.margin = 1e-3;
  const FeasibilityResult r = solve_feasibility(f, o);
  ASSERT_TRUE(r.feasible);
  EXPECT_GT(r.x(0), 1.0);
  EXPECT_LT(r.x(0), 3.0);
  EXPECT_GE(r.achieved_margin, o.margin);
}

TEST(SolveFeasibility, ScalarInfeasible) {
  AffineSymmetricForm f(1);
  f.add_block(scalar(-1.0), {{0, scalar(1.0)}});
  f.add_block(scalar(0.5), {{0, scalar(-1.0)}});
  SolverOptions o;
  o.margin = 1e-6;
  EXPECT_FALSE(solve_feasibility(f, o).feasible);
}

TEST(SolveFeasibility, MatrixInfeasibleLyapunov) {
  // A^T P + P A < 0 with P > 0 has no solution for unstable A.
  Matrix A(2, 2);
  A << 0.5, 1.0, 0.0, -1.0;
  AffineSymmetricForm f(3);
  std::vector<std::pair<int, Matrix>> lyap, pos;
  for (int k = 0; k < 3; ++k) {
    const Matrix E = sym_basis(2, k);
    lyap.emplace_back(k, -(A.transpose() * E + E * A));
    pos.emplace_back(k, E);
  }
  f.add_block(Matrix::Zero(2, 2), lyap);
  f.add_block(-Matrix::Identity(2, 2), pos);
  SolverOptions o;
  o.margin = 1e-6;
  EXPECT_FALSE(solve_feasibility(f, o).feasible);
}

TEST(SolveFeasibility, NeverClaimsFeasibleBelowMargin) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    Vector x0;
    const AffineSymmetricForm f = planted_form(rng, 4, 3, x0);
    SolverOptions o;
    o.margin = default_margin(f);
    const FeasibilityResult r = solve_feasibility(f, o);
    EXPECT_TRUE(r.feasible) << "trial " << trial;
    if (r.feasible) {
      EXPECT_LE(-fresh_min_eig(f, r.x), -o.margin + 1e-9);
      EXPECT_NEAR(max_eig_neg(f, r.x), -fresh_min_eig(f, r.x), 1e-9);
    }
  }
}

TEST(SolveFeasibility, WarmStartAtFeasiblePoint) {
  std::mt19937 rng(5);
  Vector x0;
  const AffineSymmetricForm f = planted_form(rng, 3, 2, x0);
  SolverOptions o;
  o.margin = default_margin(f);
  o.warm_start = x0;
  const FeasibilityResult r = solve_feasibility(f, o);
  ASSERT_TRUE(r.feasible);
  EXPECT_GE(fresh_min_eig(f, r.x), o.margin - 1e-12);
}

TEST(RealEmbedding, SpectrumDoubles) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> size(1, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = size(rng);
    const CMatrix h = random_hermitian(rng, n);
    const Matrix e = real_embedding(h);
    ASSERT_EQ(e.rows(), 2 * n);
    EXPECT_TRUE(e.isApprox(e.transpose()));
    const Vector lc = Eigen::SelfAdjointEigenSolver<CMatrix>(h).eigenvalues();
    Vector doubled(2 * n);
    for (int i = 0; i < n; ++i) doubled(2 * i) = doubled(2 * i + 1) = lc(i);
    std::sort(doubled.data(), doubled.data() + doubled.size());
    const Vector lr = Eigen::SelfAdjointEigenSolver<Matrix>(e).eigenvalues();
    EXPECT_LT((lr - doubled).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RealEmbedding, SpecialCases) {
  EXPECT_TRUE(real_embedding(CMatrix::Identity(2, 2)).isApprox(Matrix::Identity(4, 4)));
  CMatrix h(2, 2);
  h << 2.0, 1.0, 1.0, 3.0;
  const Matrix e = real_embedding(h);
  EXPECT_TRUE(e.topLeftCorner(2, 2).isApprox(h.real()));
  EXPECT_TRUE(e.topRightCorner(2, 2).isZero());
  CMatrix bad(2, 2);
  bad << 1.0, Complex(0, 1), Complex(0, 1), 1.0;
  EXPECT_THROW(real_embedding(bad), std::invalid_argument);
}
