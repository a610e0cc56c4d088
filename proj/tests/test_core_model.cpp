#include "ffkyp/core_model.hpp"
#include "ffkyp/system_io.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ffkyp;
using ffkyp::testing::random_matrix;

namespace {

LpvSystem scalar_lti(double a) {
  return LpvSystem::lti(Matrix::Constant(1, 1, a), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
}

std::vector<FrequencyRange> sample_ranges() {
  return {FrequencyRange::low(1.0), FrequencyRange::low(5.955), FrequencyRange::middle(1.0, 3.0),
          FrequencyRange::middle(0.0, 2.0), FrequencyRange::high(10.0), FrequencyRange::entire()};
}

}  // namespace

TEST(AffineMatrixFunction, EvaluatesAffineCombination) {
  Matrix m0(2, 2), m1(2, 2);
  m0 << 1, 2, 3, 4;
  m1 << 0, 1, 1, 0;
  AffineMatrixFunction f(m0, {m1});
  Vector p(1);
  p << 0.5;
  Matrix expected(2, 2);
  expected << 1, 2.5, 3.5, 4;
  EXPECT_TRUE(f(p).isApprox(expected));
  EXPECT_TRUE(f.rate(p).isApprox(0.5 * m1));
  EXPECT_FALSE(f.is_parameter_independent());
  EXPECT_TRUE(AffineMatrixFunction::constant(m0, 2).is_parameter_independent());
}

TEST(AffineMatrixFunction, RejectsMismatchedShapes) {
  EXPECT_THROW(AffineMatrixFunction(Matrix::Zero(2, 2), {Matrix::Zero(2, 3)}), std::invalid_argument);
}

TEST(AffineMatrixFunction, LinearInParameter) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    AffineMatrixFunction f(random_matrix(rng, 3, 2), {random_matrix(rng, 3, 2), random_matrix(rng, 3, 2)});
    const Vector p1 = random_matrix(rng, 2, 1), p2 = random_matrix(rng, 2, 1);
    const double a = u(rng);
    const Matrix lhs = eval_affine(f, a * p1 + (1 - a) * p2);
    const Matrix rhs = a * eval_affine(f, p1) + (1 - a) * eval_affine(f, p2);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ParameterBox, ValidatesOrdering) {
  ParameterBox box;
  box.p_lower = Vector::Constant(1, 0.2);
  box.p_upper = Vector::Constant(1, 0.1);
  box.rate_lower = Vector::Zero(1);
  box.rate_upper = Vector::Zero(1);
  EXPECT_THROW(box.validate(), std::invalid_argument);
  std::swap(box.p_lower, box.p_upper);
  EXPECT_NO_THROW(box.validate());
  EXPECT_TRUE(box.contains(Vector::Constant(1, 0.15)));
  EXPECT_FALSE(box.contains(Vector::Constant(1, 0.25)));
}

TEST(ParameterBox, VerticesAndGrid) {
  const ParameterBox box = example1_system().box();
  const auto v = box_vertices(box);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(parameter_vertices(box).size(), 2u);
  const auto grid = parameter_grid(box, 11);
  ASSERT_EQ(grid.size(), 11u);
  EXPECT_DOUBLE_EQ(grid.front()(0), 0.1);
  EXPECT_DOUBLE_EQ(grid.back()(0), 0.2);
  EXPECT_EQ(box_grid(box, 5).size(), 25u);
  const ParameterBox frozen = ParameterBox::frozen(Vector::Constant(1, 0.3));
  EXPECT_EQ(box_vertices(frozen).size(), 1u);
}

TEST(LpvSystem, RejectsInconsistentDimensions) {
  EXPECT_THROW(LpvSystem::lti(Matrix::Zero(2, 2), Matrix::Zero(3, 1), Matrix::Zero(1, 2), Matrix::Zero(1, 1)),
               std::invalid_argument);
  EXPECT_THROW(LpvSystem::lti(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Zero(2, 1)),
               std::invalid_argument);
}

TEST(LpvSystem, Example1Shape) {
  const LpvSystem s = example1_system();
  EXPECT_EQ(s.states(), 2);
  EXPECT_EQ(s.inputs(), 1);
  EXPECT_EQ(s.outputs(), 1);
  EXPECT_EQ(s.num_params(), 1u);
  EXPECT_FALSE(s.is_lti());
  EXPECT_TRUE(s.constant_part().is_lti());
}

TEST(FrequencyRange, ParseAndPrint) {
  EXPECT_EQ(FrequencyRange::parse("low:1"), FrequencyRange::low(1.0));
  EXPECT_EQ(FrequencyRange::parse("mid:1:3"), FrequencyRange::middle(1.0, 3.0));
  EXPECT_EQ(FrequencyRange::parse("high:10"), FrequencyRange::high(10.0));
  EXPECT_EQ(FrequencyRange::parse("entire"), FrequencyRange::entire());
  for (const auto& r : sample_ranges()) EXPECT_EQ(FrequencyRange::parse(r.to_string()), r);
  EXPECT_THROW(FrequencyRange::parse("low:0"), std::invalid_argument);
  EXPECT_THROW(FrequencyRange::parse("mid:3:1"), std::invalid_argument);
  EXPECT_THROW(FrequencyRange::parse("high:-1"), std::invalid_argument);
  EXPECT_THROW(FrequencyRange::parse("band"), std::invalid_argument);
}

TEST(FrequencyRange, Inclusion) {
  EXPECT_TRUE(FrequencyRange::low(1).subset_of(FrequencyRange::low(2)));
  EXPECT_FALSE(FrequencyRange::low(2).subset_of(FrequencyRange::low(1)));
  EXPECT_TRUE(FrequencyRange::middle(1, 2).subset_of(FrequencyRange::low(3)));
  EXPECT_TRUE(FrequencyRange::high(10).subset_of(FrequencyRange::entire()));
  EXPECT_FALSE(FrequencyRange::entire().subset_of(FrequencyRange::high(10)));
}

TEST(FrequencyWeight, HermitianAndRealWhereExpected) {
  for (const auto& r : sample_ranges()) {
    const FrequencyWeight w = frequency_weight(r);
    EXPECT_LT((w.psi - w.psi.adjoint()).cwiseAbs().maxCoeff(), 1e-15) << r.to_string();
    if (r.kind() != FrequencyRange::Kind::kMiddle) EXPECT_TRUE(w.is_real()) << r.to_string();
  }
  EXPECT_TRUE(frequency_weight(FrequencyRange::entire()).is_zero());
}

// The middle-range weight is complex and selects the positive band only.
bool weight_member(const FrequencyRange& r, double om) {
  if (r.kind() == FrequencyRange::Kind::kMiddle) return om >= r.band_lower() && om <= r.band_upper();
  return r.contains(om);
}

TEST(FrequencyWeight, SignMatchesMembership) {
  for (const auto& r : sample_ranges()) {
    if (r.kind() == FrequencyRange::Kind::kEntire) continue;
    const FrequencyWeight w = frequency_weight(r);
    std::vector<double> edges;
    for (const auto& [a, b] : r.positive_bands()) {
      if (a > 0) edges.push_back(a);
      if (std::isfinite(b)) edges.push_back(b);
    }
    for (double e : edges) {
      for (double s : {1.0, -1.0}) {
        for (double eps : {1e-3, 1e-1}) {
          for (double om : {s * e * (1 - eps), s * e * (1 + eps)}) {
            const double f = w.evaluate(om);
            if (weight_member(r, om)) {
              EXPECT_GE(f, 0.0) << r.to_string() << " at " << om;
            } else {
              EXPECT_LT(f, 0.0) << r.to_string() << " at " << om;
            }
          }
        }
      }
    }
    for (int k = 0; k <= 400; ++k) {
      const double om = -40.013 + 0.2 * k;
      if (weight_member(r, om)) EXPECT_GE(w.evaluate(om), 0.0);
      else EXPECT_LT(w.evaluate(om), 0.0);
    }
  }
}

TEST(PerformanceIndex, HinfLayout) {
  const PerformanceIndex pi = PerformanceIndex::hinf(2, 1, 3.0);
  EXPECT_EQ(pi.pi.rows(), 3);
  EXPECT_DOUBLE_EQ(pi.pi(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(pi.pi(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(pi.pi(2, 2), -9.0);
  EXPECT_DOUBLE_EQ(pi.pi(0, 2), 0.0);
}

TEST(TransferFunction, ScalarLowPass) {
  const StateSpace s = scalar_lti(-1.0).frozen(Vector(0));
  EXPECT_NEAR(std::abs(transfer_function(s, 0.0)(0, 0) - Complex(1.0, 0.0)), 0.0, 1e-15);
  const Complex g1 = transfer_function(s, 1.0)(0, 0);
  EXPECT_NEAR(std::abs(g1 - 1.0 / Complex(1.0, 1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g1), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(TransferFunction, PoleOnAxisNamesFrequency) {
  Matrix A(2, 2);
  A << 0, 2, -2, 0;
  const StateSpace s{A, Matrix::Ones(2, 1), Matrix::Ones(1, 2), Matrix::Zero(1, 1)};
  try {
    transfer_function(s, 2.0);
    FAIL() << "expected PoleOnAxisError";
  } catch (const PoleOnAxisError& e) {
    EXPECT_DOUBLE_EQ(e.omega(), 2.0);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

TEST(TransferFunction, Example1DcGain) {
  const StateSpace s = example1_system().frozen(Vector::Constant(1, 0.15));
  const Matrix dc = -s.C * s.A.inverse() * s.B + s.D;
  const CMatrix g = transfer_function(s, 0.0);
  EXPECT_NEAR(g(0, 0).real(), dc(0, 0), 1e-12);
  EXPECT_NEAR(g(0, 0).imag(), 0.0, 1e-14);
  EXPECT_NEAR(g(0, 0).real(), 0.570236577582, 1e-10);
}

TEST(TransferFunction, MatchesExplicitInverse) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const StateSpace s = ffkyp::testing::random_lti(rng, 3, 2, 2);
    for (double w : {0.0, 0.3, 1.7, 12.0}) {
      CMatrix M = Complex(0.0, w) * CMatrix::Identity(3, 3) - s.A.cast<Complex>();
      const CMatrix inv = M.inverse();
      const CMatrix ref = s.C.cast<Complex>() * inv * s.B.cast<Complex>() + s.D.cast<Complex>();
      const CMatrix g = transfer_function(s, w);
      EXPECT_LT((g - ref).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_NEAR(sigma_max(g), Eigen::JacobiSVD<CMatrix>(ref).singularValues()(0), 1e-10);
    }
  }
}

TEST(ThetaMatrices, FixedValues) {
  EXPECT_DOUBLE_EQ(theta()(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(theta()(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(theta()(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(theta_d()(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(theta_d().sum(), 1.0);
}
