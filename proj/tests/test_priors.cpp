#include <cmath>

#include <gtest/gtest.h>

#include "latacc/priors.hpp"
#include "test_util.hpp"

namespace {

using latacc::BetaParams;
using latacc::beta_tail;
using latacc::elicit_beta;

TEST(BetaParams, ValidatesShapes) {
  EXPECT_THROW(BetaParams(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(BetaParams(1.0, -2.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(BetaParams(20, 4).mean(), 20.0 / 24.0);
  EXPECT_DOUBLE_EQ(BetaParams(20, 4).mode(), 19.0 / 22.0);
  EXPECT_THROW(BetaParams(1.0, 2.0).mode(), std::invalid_argument);
}

TEST(BetaTail, ClosedFormLinearDensity) {
  // Beta(2,1) has density 2t, so P(X > x) = 1 - x^2.
  for (const double x : {0.1, 0.25, 0.5, 0.9})
    EXPECT_NEAR(beta_tail(BetaParams(2, 1), x), 1.0 - x * x, 1e-10);
  EXPECT_NEAR(beta_tail(BetaParams(2, 1), 0.5), 0.75, 1e-12);
}

TEST(BetaTail, ClosedFormUniform) {
  EXPECT_NEAR(beta_tail(BetaParams(1, 1), 0.8), 0.2, 1e-12);
}

TEST(BetaTail, ClosedFormPowerFamilies) {
  // Beta(a,1): P(X > x) = 1 - x^a;  Beta(1,b): P(X > x) = (1-x)^b.
  testutil::CaseRng rng(201);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(0.2, 60.0);
    const double x = rng.uniform(0.01, 0.99);
    EXPECT_NEAR(beta_tail(BetaParams(a, 1.0), x), 1.0 - std::pow(x, a), 1e-10);
    EXPECT_NEAR(beta_tail(BetaParams(1.0, a), x), std::pow(1.0 - x, a), 1e-10);
  }
}

TEST(BetaTail, EndpointsExact) {
  testutil::CaseRng rng(202);
  for (int i = 0; i < 100; ++i) {
    const BetaParams p(rng.uniform(0.2, 50.0), rng.uniform(0.2, 50.0));
    EXPECT_EQ(beta_tail(p, 0.0), 1.0);
    EXPECT_EQ(beta_tail(p, 1.0), 0.0);
  }
  EXPECT_THROW(beta_tail(BetaParams(2, 2), -0.1), std::invalid_argument);
  EXPECT_THROW(beta_tail(BetaParams(2, 2), 1.1), std::invalid_argument);
}

TEST(BetaTail, MonotoneDecreasingInThreshold) {
  testutil::CaseRng rng(203);
  for (int i = 0; i < 1000; ++i) {
    const BetaParams p(rng.uniform(0.5, 40.0), rng.uniform(0.5, 40.0));
    const double x1 = rng.uniform(0.0, 1.0);
    const double x2 = rng.uniform(x1, 1.0);
    EXPECT_GE(beta_tail(p, x1) + 1e-14, beta_tail(p, x2));
  }
}

TEST(BetaTail, ReflectionSymmetry) {
  testutil::CaseRng rng(204);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(0.3, 40.0);
    const double b = rng.uniform(0.3, 40.0);
    const double x = rng.uniform01();
    EXPECT_NEAR(beta_tail(BetaParams(a, b), x),
                1.0 - beta_tail(BetaParams(b, a), 1.0 - x), 1e-10);
  }
}

// The quadrature oracle pins the continued-fraction evaluation, including the
// worked example's Beta(20,4) prior, whose mass above 0.8 is 0.70347 (computed
// by integration, cross-checked against series and Monte Carlo evaluations).
TEST(BetaTail, AgreesWithQuadratureOracle) {
  const double quad_204 = testutil::beta_tail_quadrature(20, 4, 0.8);
  EXPECT_NEAR(quad_204, 0.7034685890151189, 1e-9);
  EXPECT_NEAR(beta_tail(BetaParams(20, 4), 0.8), quad_204, 1e-10);

  testutil::CaseRng rng(205);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(1.0, 50.0);
    const double b = rng.uniform(1.0, 50.0);
    const double x = rng.uniform(0.02, 0.98);
    EXPECT_NEAR(beta_tail(BetaParams(a, b), x), testutil::beta_tail_quadrature(a, b, x),
                1e-9);
  }
}

TEST(ElicitBeta, RecoversSymmetricShape) {
  const double tail = beta_tail(BetaParams(3, 3), 0.2);
  const BetaParams p = elicit_beta(0.5, 0.2, tail);
  EXPECT_NEAR(p.a(), 3.0, 1e-4);
  EXPECT_NEAR(p.b(), 3.0, 1e-4);
}

TEST(ElicitBeta, RecoversInformativeAccuracyPrior) {
  const double tail = beta_tail(BetaParams(20, 4), 0.8);
  const BetaParams p = elicit_beta(19.0 / 22.0, 0.8, tail);
  EXPECT_NEAR(p.a(), 20.0, 2e-3);
  EXPECT_NEAR(p.b(), 4.0, 2e-3);
}

TEST(ElicitBeta, ModeIsReproducedExactly) {
  const BetaParams p = elicit_beta(0.7, 0.5, 0.9);
  EXPECT_GT(p.a(), 1.0);
  EXPECT_GE(p.b(), 1.0);
  EXPECT_NEAR(p.mode(), 0.7, 1e-12);
  EXPECT_NEAR(beta_tail(p, 0.5), 0.9, 1e-6);
}

TEST(ElicitBeta, RefusesImpossibleStatement) {
  // Mode at 0.9 cannot put 99% of the mass above 0.95 for any concentration.
  try {
    elicit_beta(0.9, 0.95, 0.99);
    FAIL() << "expected elicitation_error";
  } catch (const latacc::elicitation_error& e) {
    EXPECT_NE(std::string(e.what()).find("too large"), std::string::npos);
  }
  // And the opposite direction: mode above the threshold forces a heavy tail.
  try {
    elicit_beta(0.9, 0.5, 0.1);
    FAIL() << "expected elicitation_error";
  } catch (const latacc::elicitation_error& e) {
    EXPECT_NE(std::string(e.what()).find("too small"), std::string::npos);
  }
}

TEST(ElicitBeta, ValidatesInputs) {
  EXPECT_THROW(elicit_beta(0.5, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(elicit_beta(0.0, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(elicit_beta(0.5, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(elicit_beta(0.5, 0.2, 0.0), std::invalid_argument);
  EXPECT_THROW(elicit_beta(0.5, 0.2, 1.0), std::invalid_argument);
}

TEST(ElicitBeta, RoundTripProperty) {
  testutil::CaseRng rng(206);
  int cases = 0;
  while (cases < 1000) {
    const double a = rng.uniform(1.5, 60.0);
    const double b = rng.uniform(1.5, 60.0);
    const BetaParams truth(a, b);
    const double mode = truth.mode();
    const double x = rng.uniform(0.05, 0.95);
    if (std::fabs(x - mode) < 0.05) continue;
    const double tail = beta_tail(truth, x);
    if (tail < 1e-3 || tail > 1.0 - 1e-3) continue;
    ++cases;
    const BetaParams back = elicit_beta(mode, x, tail);
    EXPECT_NEAR(back.a(), a, 1e-3 * a) << "a=" << a << " b=" << b << " x=" << x;
    EXPECT_NEAR(back.b(), b, 1e-3 * b) << "a=" << a << " b=" << b << " x=" << x;
  }
}

}  // namespace
