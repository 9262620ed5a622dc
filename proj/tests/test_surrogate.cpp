#include <gtest/gtest.h>

#include <cmath>

#include "gen.hpp"
#include "oracles.hpp"
#include "serum/error.hpp"
#include "serum/surrogate.hpp"

using namespace serum;

namespace {
const ErrorRates kRates{0.3, 0.2};  // e1, e0
}

TEST(Surrogate, NoiselessReferenceIsTheBaseRule) {
  EXPECT_NEAR(ssr(ScoringRule::brier(), Prediction{0.8}, 1, {0.0, 0.0}), 0.96, 1e-12);
}

TEST(Surrogate, BrierPoints) {
  const auto brier = ScoringRule::brier();
  EXPECT_NEAR(ssr(brier, Prediction{0.8}, 1, kRates), 1.32, 1e-12);
  EXPECT_NEAR(ssr(brier, Prediction{0.8}, 0, kRates), 0.12, 1e-12);
  EXPECT_NEAR(expected_ssr_given_y(brier, Prediction{0.8}, 1, kRates), 0.96, 1e-12);
}

TEST(Surrogate, NegativelyInformativeReferenceStillUnbiased) {
  const ErrorRates flipped{0.6, 0.7};
  const auto brier = ScoringRule::brier();
  for (int y = 0; y <= 1; ++y) {
    for (double p : {0.0, 0.25, 0.8, 1.0}) {
      EXPECT_NEAR(expected_ssr_given_y(brier, Prediction{p}, y, flipped),
                  brier.score(Prediction{p}, y), 1e-12);
    }
  }
}

TEST(Surrogate, DegenerateReferenceThrows) {
  EXPECT_THROW(ssr(ScoringRule::brier(), Prediction{0.5}, 1, {0.5, 0.5}), DegenerateError);
  EXPECT_THROW(ssr(ScoringRule::brier(), Prediction{0.5}, 1, {0.4, 0.6}), DegenerateError);
  EXPECT_THROW(ssr(ScoringRule::brier(), Prediction{0.5}, 2, kRates), ValidationError);
}

// Random rules, reports and channels: the surrogate equals the solution of
// the 2x2 unbiasedness system, and its conditional mean is the base score.
TEST(Surrogate, MatchesInversionOracle) {
  testkit::Gen g(42);
  for (int trial = 0; trial < 2000; ++trial) {
    const ErrorRates e = g.rates(0.02);
    const ScorePair s{g.in(-3, 3), g.in(-3, 3)};
    const auto phi = oracle::surrogate_by_inversion(s.on0, s.on1, e.e1, e.e0);
    const double scale = 1.0 / std::abs(e.margin());
    for (int o = 0; o <= 1; ++o) EXPECT_NEAR(ssr(s, o, e), phi[o], 1e-11 * scale);
    for (int y = 0; y <= 1; ++y) EXPECT_NEAR(expected_ssr_given_y(s, y, e), s.at(y), 1e-11 * scale);
  }
}

// Scoring against z with rates e is the same as scoring against the flipped
// reference 1 - z with rates (1 - e1, 1 - e0).
TEST(Surrogate, FlipIdentityOnRandomInputs) {
  testkit::Gen g(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const ErrorRates e = g.rates(0.02);
    const ScorePair s{g.in(-2, 2), g.in(-2, 2)};
    const ErrorRates flipped{1.0 - e.e1, 1.0 - e.e0};
    for (int o = 0; o <= 1; ++o) EXPECT_EQ(ssr(s, o, e), ssr(s, 1 - o, flipped));
  }
}

TEST(Surrogate, VarianceOfNoiselessBrierUnderFairPrior) {
  EXPECT_NEAR(ssr_variance(ScoringRule::brier(), Prediction{0.8}, {0.0, 0.0}, Prior{0.5, 0.5}),
              0.09, 1e-12);
}

TEST(Surrogate, ConstantScoresHaveZeroVariance) {
  EXPECT_EQ(ssr_variance(ScorePair{0.7, 0.7}, kRates, Prior{0.4, 0.6}), 0.0);
}

TEST(Surrogate, VarianceGrowsAsReferenceLosesInformation) {
  const auto brier = ScoringRule::brier();
  for (double p : {0.1, 0.5, 0.8}) {
    double previous = -1.0;
    for (int step = 0; step <= 45; ++step) {
      const double t = step / 100.0;
      const double v = ssr_variance(brier, Prediction{p}, {t, t}, Prior{0.4, 0.6});
      EXPECT_TRUE(std::isfinite(v));
      EXPECT_GE(v, previous - 1e-12) << "p " << p << " t " << t;
      previous = v;
    }
  }
}

TEST(Surrogate, VarianceMatchesDirectEnumeration) {
  testkit::Gen g(99);
  for (int trial = 0; trial < 500; ++trial) {
    const ErrorRates e = g.rates(0.05);
    const Prior prior = g.prior();
    const ScorePair s{g.in(-1, 1), g.in(-1, 1)};
    const auto phi = oracle::surrogate_by_inversion(s.on0, s.on1, e.e1, e.e0);
    double m1 = 0.0, m2 = 0.0;
    for (int y = 0; y <= 1; ++y) {
      for (int z = 0; z <= 1; ++z) {
        const double pz = z == 1 ? e.prob_one(y) : 1.0 - e.prob_one(y);
        const double w = prior.mass(y) * pz;
        m1 += w * phi[z];
        m2 += w * phi[z] * phi[z];
      }
    }
    const double expected = m2 - m1 * m1;
    EXPECT_NEAR(ssr_variance(s, e, prior), expected, 1e-9 * (1.0 + expected));
  }
}
