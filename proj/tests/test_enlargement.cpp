#include "ffkyp/enlargement.hpp"
#include "ffkyp/system_io.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <random>

using namespace ffkyp;
using ffkyp::testing::random_matrix;

namespace {

double sigma(const Matrix& A) { return Eigen::JacobiSVD<Matrix>(A).singularValues()(0); }

}  // namespace

TEST(DeltaSquared, PublishedArithmetic) {
  const double d2 = delta_squared(164.62, {0.4858, 0.0, 0.1017}, StabilityMode::kUas);
  EXPECT_NEAR(d2, 164.62 * 0.1017 / 0.4858, 1e-12);
  EXPECT_NEAR(d2 / 34.4624, 1.0, 0.005);
  const FrequencyRange r = enlarge_range(FrequencyRange::low(1.0), 34.4624).range;
  ASSERT_EQ(r.kind(), FrequencyRange::Kind::kLow);
  EXPECT_NEAR(r.low_cutoff() / 5.955, 1.0, 0.001);
}

TEST(DeltaSquared, BibsSubtractsWeightedTraceAndClamps) {
  EXPECT_NEAR(delta_squared(10.0, {2.0, 0.5, 1.5}, StabilityMode::kBibs), 10.0 * 1.0 / 2.0, 1e-12);
  EXPECT_EQ(delta_squared(10.0, {2.0, 3.0, 1.5}, StabilityMode::kBibs), 0.0);
  EXPECT_NEAR(delta_squared(10.0, {2.0, 0.0, 1.0}, StabilityMode::kUas, 2.0), 10.0, 1e-12);
}

TEST(DeltaSquared, ZeroGapGivesZero) {
  EXPECT_EQ(delta_squared(0.0, {1.0, 0.0, 5.0}, StabilityMode::kUas), 0.0);
  EXPECT_EQ(delta_squared(0.0, {1.0, 0.2, 5.0}, StabilityMode::kBibs), 0.0);
}

TEST(DeltaSquared, RejectsUncontrollableDenominator) {
  try {
    delta_squared(1.0, {0.0, 0.0, 1.0}, StabilityMode::kUas);
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("controllable"), std::string::npos);
  }
}

TEST(DeltaSquared, MonotoneInInputs) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.01, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double g = u(rng), wp = u(rng), wd = u(rng), step = 0.1 * u(rng);
    for (auto mode : {StabilityMode::kUas, StabilityMode::kBibs}) {
      const double wh = mode == StabilityMode::kBibs ? 0.5 * u(rng) : 0.0;
      const double base = delta_squared(g, {wp, wh, wd}, mode);
      EXPECT_GE(delta_squared(g + step, {wp, wh, wd}, mode), base);
      EXPECT_GE(delta_squared(g, {wp, wh, wd + step}, mode), base);
      EXPECT_LE(delta_squared(g, {wp + step, wh, wd}, mode), base);
      EXPECT_GE(base, 0.0);
    }
  }
}

TEST(EnlargeRange, ContainsOriginal) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(0.1, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a = u(rng), b = a + u(rng), d2 = u(rng) * u(rng);
    for (const auto& r : {FrequencyRange::low(a), FrequencyRange::middle(a, b), FrequencyRange::high(b),
                          FrequencyRange::entire()}) {
      const EnlargedRange e = enlarge_range(r, d2);
      EXPECT_TRUE(r.subset_of(e.range)) << r.to_string() << " -> " << e.range.to_string();
    }
  }
}

TEST(EnlargeRange, ClosedForms) {
  EXPECT_EQ(enlarge_range(FrequencyRange::low(3.0), 16.0).range, FrequencyRange::low(5.0));
  EXPECT_EQ(enlarge_range(FrequencyRange::high(5.0), 16.0).range, FrequencyRange::high(3.0));
  const EnlargedRange h = enlarge_range(FrequencyRange::high(2.0), 16.0);
  EXPECT_EQ(h.range, FrequencyRange::entire());
  EXPECT_FALSE(h.warnings.empty());
  const FrequencyRange m = enlarge_range(FrequencyRange::middle(4.0, 6.0), 3.0).range;
  EXPECT_NEAR(m.band_lower(), 5.0 - 2.0, 1e-12);
  EXPECT_NEAR(m.band_upper(), 5.0 + 2.0, 1e-12);
  const EnlargedRange m2 = enlarge_range(FrequencyRange::middle(1.0, 2.0), 9.0);
  EXPECT_EQ(m2.range.kind(), FrequencyRange::Kind::kLow);
  EXPECT_FALSE(m2.warnings.empty());
  EXPECT_EQ(enlarge_range(FrequencyRange::low(1.0), 0.0).range, FrequencyRange::low(1.0));
  EXPECT_THROW(enlarge_range(FrequencyRange::low(1.0), -1.0), std::invalid_argument);
}

TEST(Gap, LowRangeClosedForm) {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix A = random_matrix(rng, 3, 3);
    const double w = u(rng);
    const double s = sigma(A);
    const double expected = std::max(0.0, s * s - w * w);
    EXPECT_NEAR(gap_squared_at(A, FrequencyRange::low(w)), expected, 1e-9 * std::max(1.0, s * s));
  }
}

TEST(Gap, NonNegativeForAllKinds) {
  std::mt19937 rng(60);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = random_matrix(rng, 2, 2, 3.0);
    for (const auto& r : {FrequencyRange::low(1.0), FrequencyRange::middle(1.0, 2.0), FrequencyRange::high(3.0),
                          FrequencyRange::entire()}) {
      EXPECT_GE(gap_squared_at(A, r), 0.0);
    }
    EXPECT_EQ(gap_squared_at(A, FrequencyRange::entire()), 0.0);
  }
}

TEST(Gap, Example1Regression) {
  const double g = gap_squared(example1_system(), FrequencyRange::low(1.0));
  EXPECT_NEAR(g, 163.6235, 1e-3);
  const double s = uniform_spectral_norm(example1_system());
  EXPECT_NEAR(g, s * s - 1.0, 1e-9 * g);
}

TEST(SpectralRadius, Example1Regression) {
  EXPECT_NEAR(uniform_spectral_radius(example1_system()), 11.0168, 1e-3);
  EXPECT_NEAR(uniform_spectral_norm(example1_system()), 12.8306, 1e-3);
}

TEST(RecommendRange, LtiNeedsNoEnlargementTerm) {
  Matrix A(2, 2);
  A << -3, 1, 0, -4;
  const LpvSystem s = LpvSystem::lti(A, Matrix::Ones(2, 1), Matrix::Ones(1, 2), Matrix::Zero(1, 1));
  const EnlargementResult r = recommend_range(s, FrequencyRange::low(1.0));
  EXPECT_GT(r.gap_squared, 0.0);
  EXPECT_EQ(r.trace_w_dot_p, 0.0);
  EXPECT_EQ(r.delta_squared, 0.0);
  EXPECT_EQ(r.enlarged, FrequencyRange::low(1.0));
}

TEST(RecommendRange, WideCutoffIsUnchanged) {
  const EnlargementResult r = recommend_range(example1_system(), FrequencyRange::low(13.0));
  EXPECT_EQ(r.gap_squared, 0.0);
  EXPECT_EQ(r.delta_squared, 0.0);
  EXPECT_TRUE(r.spectral_radius_shortcut);
  EXPECT_EQ(r.enlarged, FrequencyRange::low(13.0));
}

TEST(RecommendRange, CutoffAtSpectralNormIsEssentiallyUnchanged) {
  const EnlargementResult r = recommend_range(example1_system(), FrequencyRange::low(12.8306));
  EXPECT_LT(r.gap_squared, 1e-3);
  EXPECT_NEAR(r.enlarged.low_cutoff(), 12.8306, 1e-4);
}

TEST(RecommendRange, Example1PipelineRegression) {
  EnlargementOptions o;
  o.c1 = 0.5;
  o.c2 = 0.6;
  o.c3 = 7.4;
  const EnlargementResult r = recommend_range(example1_system(), FrequencyRange::low(1.0), o);
  EXPECT_TRUE(FrequencyRange::low(1.0).subset_of(r.enlarged));
  ASSERT_TRUE(r.uas.has_value());
  EXPECT_NEAR(r.uas->alpha, 1.2, 1e-12);
  EXPECT_NEAR(r.trace_w_p_min, 26.8449, 1e-3);
  EXPECT_NEAR(r.trace_w_dot_p, 2.0153, 1e-3);
  EXPECT_NEAR(r.delta_squared, 12.2836, 1e-3);
  EXPECT_NEAR(r.enlarged.low_cutoff(), 3.6447, 1e-3);
}
