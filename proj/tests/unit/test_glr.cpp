// Copyright 2026 The dpbai Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Transportation costs, the three stopping thresholds and the GLR verdict.

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "dpbai/glr.hpp"

namespace dpbai {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

// z - ln z = y by plain fixed-point iteration, independent of the Newton code
double wbar_fixed_point(double y) {
  double z = y;
  for (int i = 0; i < 500; ++i) z = y + std::log(z);
  return z;
}

TEST(WGauss, Examples) {
  EXPECT_EQ(w_gauss(0.7, 0.7, 3.0, 5.0, 0.5), 0.0);
  EXPECT_EQ(w_gauss(0.2, 0.7, 3.0, 5.0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(w_gauss(0.9, 0.4, 2.0, 2.0, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(w_gauss(0.9, 0.4, 3.0, 17.0, 0.5), w_gauss(0.9, 0.4, 17.0, 3.0, 0.5));
}

TEST(WGaussEps, Examples) {
  // gap below eps / 2: identical to the plain cost
  EXPECT_DOUBLE_EQ(w_gauss_eps(0.6, 0.5, 7.0, 9.0, 1.0), w_gauss(0.6, 0.5, 7.0, 9.0, 0.5));
  EXPECT_NEAR(w_gauss_eps(0.9, 0.5, 10.0, 10.0, 0.2), 0.4, 1e-12);
  EXPECT_EQ(w_gauss_eps(0.5, 0.9, 10.0, 10.0, 0.2), 0.0);
}

TEST(WGaussEps, MonotoneInGap) {
  for (double eps : {0.05, 0.3, 2.0}) {
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double gap = i / 200.0;
      const double v = w_gauss_eps(gap, 0.0, 12.0, 30.0, eps);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(ThresholdNonPrivate, SymmetricAndMonotoneInDelta) {
  EXPECT_DOUBLE_EQ(threshold_nonprivate(3.0, 500.0, 0.01, 5), threshold_nonprivate(500.0, 3.0, 0.01, 5));
  for (double w : {1.0, 10.0, 1e4}) {
    double d = 0.2;
    double prev = threshold_nonprivate(w, w, d, 5);
    for (int i = 0; i < 30; ++i) {
      d /= 2.0;
      const double v = threshold_nonprivate(w, w, d, 5);
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(ThresholdNonPrivate, ApproximationIsClose) {
  const double exact = threshold_nonprivate(100.0, 100.0, 0.01, 5);
  const double approx = threshold_nonprivate(100.0, 100.0, 0.01, 5, ThresholdMode::kApprox);
  EXPECT_LT(std::fabs(exact - approx), 4.0);
  // by hand: 2 C_G(ln(4 / 0.01) / 2) + 4 ln(4 + ln 100)
  EXPECT_NEAR(exact, 2.0 * c_gaussian(std::log(400.0) / 2.0) + 4.0 * std::log(4.0 + std::log(100.0)), 1e-12);
}

double privacy_part_v1(double w, double delta, double eps, std::size_t K) {
  const double k = k_log2(w);
  const double split = delta * 18.0 / (kPi2 * kPi2 * k * k * k * k);
  return threshold_private_v1(w, w, delta, eps, 0.5, K) - 2.0 * threshold_nonprivate(w, w, split, K);
}

TEST(ThresholdV1, PrivacyTermVanishesForLargeEpsilon) {
  const double total = threshold_private_v1(100.0, 100.0, 0.01, 1e6, 0.5, 5);
  EXPECT_GE(privacy_part_v1(100.0, 0.01, 1e6, 5), 0.0);
  EXPECT_LT(privacy_part_v1(100.0, 0.01, 1e6, 5), 1e-6 * total);
  // and the remainder is the doubled non-private threshold at the split delta
  EXPECT_NEAR(privacy_part_v1(1e3, 0.001, 1e9, 7), 0.0, 1e-9);
}

TEST(ThresholdV1, PrivacyTermByHand) {
  // w = 4: k = 4, ln(pi^2 * 5 * 16 / (3 * 0.01)) twice, over eps^2 sigma^2 w
  const double l = std::log(kPi2 * 5.0 * 16.0 / 0.03);
  EXPECT_NEAR(privacy_part_v1(4.0, 0.01, 2.0, 5), 2.0 * l * l / (4.0 * 4.0 * 0.25), 1e-9);
}

double v1_shape_ratio(double w, double delta, double eps) {
  const double l = std::log(1.0 / delta);
  return threshold_private_v1(w, w, delta, eps, 0.5, 5) / (2.0 * l + (2.0 / w) * l * l / (eps * eps * 0.25));
}

// Leading-order shape 2 ln(1/delta) + (2/w) ln(1/delta)^2 / (eps sigma)^2.
// The k(w)^4 split and the log-log terms are lower order but still sizeable
// at delta = 1e-8 once w grows, so the band is checked at w = 1 there and
// everywhere from delta = 1e-30 on.
TEST(ThresholdV1, LeadingOrderShape) {
  for (double eps : {0.1, 1.0}) {
    const double r = v1_shape_ratio(1.0, 1e-8, eps);
    EXPECT_GE(r, 0.8);
    EXPECT_LE(r, 1.6);
  }
  for (double w : {1.0, 100.0, 1e4}) {
    for (double eps : {0.1, 1.0, 10.0}) {
      double prev = INFINITY;
      for (double delta : {1e-8, 1e-30, 1e-100, 1e-300}) {
        const double r = v1_shape_ratio(w, delta, eps);
        EXPECT_LT(r, prev) << "w " << w << " eps " << eps << " delta " << delta;
        prev = r;
        if (delta <= 1e-30) {
          EXPECT_GE(r, 0.8);
          EXPECT_LE(r, 1.6) << "w " << w << " eps " << eps << " delta " << delta;
        }
      }
      EXPECT_LT(prev, 1.05);
    }
  }
}

TEST(HFunc, ExampleByRoundTrip) {
  const double inner = 2.0 * std::log(kPi2 * 5.0 * 4.0 / 0.02) + 4.0 * std::log(4.0) + 0.5;
  const double h = h_func(1.0, 0.01, 5);
  const double z = 2.0 * h;
  EXPECT_NEAR(z - std::log(z), inner, 1e-10);
  EXPECT_NEAR(z, wbar_fixed_point(inner), 1e-9);
}

TEST(HFunc, IncreasingInInverseDeltaAndAboveLog) {
  for (double w : {1.0, 8.0, 1000.0}) {
    double prev = 0.0;
    for (double delta : {0.4, 0.1, 0.01, 1e-4, 1e-8, 1e-12}) {
      const double h = h_func(w, delta, 5);
      EXPECT_GT(h, prev);
      prev = h;
      const double k = k_log2(w);
      EXPECT_GE(h, std::log(kPi2 * 5.0 * k * k / (2.0 * delta)));
    }
  }
}

TEST(ThresholdV2, BothBranchesFiniteAtTheSwitch) {
  const double eps = 0.4;
  for (double off : {-1e-9, 1e-9}) {
    const double v = threshold_private_v2(0.5 + 0.5 * eps + off, 0.5, 30.0, 50.0, 0.01, eps, 0.5, 5);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
  }
  EXPECT_EQ(threshold_private_v2(0.7, 0.5, 30.0, 50.0, 0.01, 1.0, 0.5, 5),
            threshold_private_v2_low(30.0, 50.0, 0.01, 1.0, 0.5, 5));
  EXPECT_EQ(threshold_private_v2(0.9, 0.5, 30.0, 50.0, 0.01, 0.2, 0.5, 5),
            threshold_private_v2_high(30.0, 50.0, 0.01, 0.2, 0.5, 5));
}

TEST(ThresholdV2, LargeEpsilonReducesToHalfV1) {
  for (double w : {4.0, 256.0}) {
    const double half_v1 = 0.5 * threshold_private_v1(w, w, 2.0 * 0.01 / 3.0, 1e6, 0.5, 5);
    const double v2 = threshold_private_v2(0.6, 0.5, w, w, 0.01, 1e6, 0.5, 5);
    EXPECT_NEAR(v2 / half_v1, 1.0, 1e-4);
  }
}

TEST(ThresholdV2, HighGapBranchByHand) {
  // sigma = 1/2, w = 64, K = 5, delta = 0.01, eps = 1
  const double w = 64.0;
  const double inner = 2.0 * std::log(kPi2 * 5.0 * 64.0 / 0.02) + 4.0 * std::log(4.0 + std::log(64.0)) + 0.5;
  const double h = wbar_fixed_point(inner) / 2.0;
  const double hand = 2.0 * std::log(kPi2 * 5.0 * 8.0 / 0.02) + (1.0 / std::sqrt(2.0)) * 2.0 * std::sqrt(w * h);
  EXPECT_NEAR(threshold_private_v2(0.95, 0.2, w, w, 0.01, 1.0, 0.5, 5), hand, 1e-8);
}

TEST(ThresholdV2, LowBranchDominatesHalfV1) {
  for (double wa : {1.0, 16.0, 1000.0}) {
    for (double wb : {2.0, 64.0}) {
      for (double eps : {0.05, 1.0, 20.0}) {
        for (double delta : {0.1, 0.01, 1e-6}) {
          EXPECT_GE(threshold_private_v2_low(wa, wb, delta, eps, 0.5, 5),
                    0.5 * threshold_private_v1(wa, wb, 2.0 * delta / 3.0, eps, 0.5, 5));
        }
      }
    }
  }
}

TEST(Thresholds, AllPositive) {
  for (double w : {1.0, 3.0, 1e6}) {
    for (double delta : {0.5, 0.01, 1e-9}) {
      EXPECT_GT(threshold_nonprivate(w, w, delta, 2), 0.0);
      EXPECT_GT(threshold_private_v1(w, 2.0 * w, delta, 0.01, 0.5, 5), 0.0);
      EXPECT_GT(threshold_private_v2(0.5, 0.1, w, w, delta, 0.1, 0.5, 5), 0.0);
      EXPECT_GT(threshold_private_v2(0.5, 0.49, w, w, delta, 0.1, 0.5, 5), 0.0);
    }
  }
}

GlrContext ctx(std::vector<double> means, std::vector<double> weights, double delta = 0.01) {
  GlrContext c;
  c.means = std::move(means);
  c.weights = std::move(weights);
  c.delta = delta;
  return c;
}

TEST(GlrVerdict, EqualMeansNeverStop) {
  auto c = ctx({0.5, 0.5, 0.5}, {1e9, 1e9, 1e9});
  c.epsilon = 1.0;
  for (auto [cost, thr] : {std::pair{CostKind::kGauss, ThresholdKind::kNonPrivate},
                           std::pair{CostKind::kGauss, ThresholdKind::kV1},
                           std::pair{CostKind::kGaussEps, ThresholdKind::kV2}}) {
    const auto v = glr_verdict(c, cost, thr);
    EXPECT_FALSE(v.stop);
    EXPECT_EQ(v.recommended, 0u);
  }
}

TEST(GlrVerdict, LargeGapLargeWeightsStop) {
  const auto c = ctx({0.9, 0.4}, {1e6, 1e6});
  const auto v = glr_verdict(c, CostKind::kGauss, ThresholdKind::kNonPrivate);
  EXPECT_TRUE(v.stop);
  ASSERT_EQ(v.margins.size(), 1u);
  // W = 0.25 / (0.5 * 2e-6) = 2.5e5
  EXPECT_NEAR(v.margins[0] + threshold_nonprivate(1e6, 1e6, 0.01, 2), 2.5e5, 1e-6);
}

TEST(GlrVerdict, ScalingWeightsEventuallyStops) {
  std::vector<double> w = {40.0, 12.0, 12.0};
  auto c = ctx({0.6, 0.5, 0.4}, w);
  ASSERT_FALSE(glr_verdict(c, CostKind::kGauss, ThresholdKind::kNonPrivate).stop);
  int scalings = 0;
  while (!glr_verdict(c, CostKind::kGauss, ThresholdKind::kNonPrivate).stop && scalings < 20) {
    for (double& x : c.weights) x *= 10.0;
    ++scalings;
  }
  EXPECT_LT(scalings, 20);
  // once stopped, stays stopped under further scaling
  for (int i = 0; i < 3; ++i) {
    for (double& x : c.weights) x *= 10.0;
    EXPECT_TRUE(glr_verdict(c, CostKind::kGauss, ThresholdKind::kNonPrivate).stop);
  }
}

TEST(GlrVerdict, RejectsUnsupportedPairings) {
  auto c = ctx({0.6, 0.5}, {10.0, 10.0});
  c.epsilon = 1.0;
  EXPECT_THROW(glr_verdict(c, CostKind::kGaussEps, ThresholdKind::kNonPrivate), ConfigError);
  EXPECT_THROW(glr_verdict(c, CostKind::kGaussEps, ThresholdKind::kV1), ConfigError);
  EXPECT_THROW(glr_verdict(c, CostKind::kGauss, ThresholdKind::kV2), ConfigError);
  c.epsilon.reset();
  EXPECT_THROW(glr_verdict(c, CostKind::kGauss, ThresholdKind::kV1), ConfigError);
}

TEST(GlrVerdict, RivalOrderDoesNotMatter) {
  auto a = ctx({0.8, 0.3, 0.6, 0.7}, {500.0, 20.0, 300.0, 400.0});
  auto b = ctx({0.8, 0.7, 0.3, 0.6}, {500.0, 400.0, 20.0, 300.0});
  a.epsilon = b.epsilon = 0.5;
  for (auto [cost, thr] : {std::pair{CostKind::kGauss, ThresholdKind::kNonPrivate},
                           std::pair{CostKind::kGauss, ThresholdKind::kV1},
                           std::pair{CostKind::kGaussEps, ThresholdKind::kV2}}) {
    const auto va = glr_verdict(a, cost, thr);
    const auto vb = glr_verdict(b, cost, thr);
    EXPECT_EQ(va.stop, vb.stop);
    ASSERT_EQ(va.margins.size(), 3u);
    EXPECT_EQ(va.margins[0], vb.margins[1]);
    EXPECT_EQ(va.margins[1], vb.margins[2]);
    EXPECT_EQ(va.margins[2], vb.margins[0]);
  }
}

TEST(GlrVerdict, GapAndSigmaScaleTogether) {
  const std::vector<double> means = {0.8, 0.3, 0.6};
  const std::vector<double> w = {50.0, 7.0, 33.0};
  for (std::size_t b = 1; b < 3; ++b) {
    const double base = w_gauss(means[0], means[b], w[0], w[b], 0.5);
    // factor 2 keeps every product exact in binary floating point
    const double scaled = w_gauss(2.0 * means[0], 2.0 * means[b], w[0], w[b], 1.0);
    EXPECT_EQ(base, scaled);
    EXPECT_GE(base, 0.0);
  }
}

TEST(GlrVerdict, CandidateTiesGoToLowestIndex) {
  const auto c = ctx({0.4, 0.7, 0.7}, {10.0, 10.0, 10.0});
  EXPECT_EQ(glr_verdict(c, CostKind::kGauss, ThresholdKind::kNonPrivate).recommended, 1u);
}

}  // namespace
}  // namespace dpbai
