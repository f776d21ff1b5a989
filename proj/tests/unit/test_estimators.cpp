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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include <gtest/gtest.h>

#include "dpbai/estimators.hpp"
#include "dpbai/invariants.hpp"
#include "dpbai/rng.hpp"
#include "dpbai/top_two.hpp"

namespace dpbai {
namespace {

double coin(RngStream& g, double p) { return g.uniform_open() < p ? 1.0 : 0.0; }

TEST(Mle, RunningMeanAndCount) {
  RngStream g(1, 0);
  MleEstimator est(2);
  est.observe_initial(0, 1.0, 1, g);
  est.observe_initial(1, 0.25, 2, g);
  EXPECT_EQ(est.mean(1), 0.25);
  EXPECT_EQ(est.weight(1), 1.0);
  est.observe(0, 0.0, 3, g);
  est.observe(0, 1.0, 4, g);
  EXPECT_DOUBLE_EQ(est.mean(0), 2.0 / 3.0);
  EXPECT_EQ(est.weight(0), 3.0);
  EXPECT_EQ(est.count(0), 3);
}

TEST(Mle, ConvergesOnBernoulli) {
  RngStream g(2, 0);
  MleEstimator est(1);
  est.observe_initial(0, coin(g, 0.7), 1, g);
  for (int i = 2; i <= 10'000; ++i) est.observe(0, coin(g, 0.7), i, g);
  EXPECT_NEAR(est.mean(0), 0.7, 0.02);
}

TEST(Ctb, NearlyNoFlipsAtLargeEpsilon) {
  RngStream rewards(3, 0);
  RngStream noise(3, 1);
  CtbEstimator ctb(1, 50.0);
  MleEstimator mle(1);
  std::vector<int> bits;
  ctb.set_flip_log(&bits);
  std::vector<double> raw;
  for (int i = 1; i <= 10'000; ++i) {
    const double r = coin(rewards, 0.3);
    raw.push_back(r);
    if (i == 1) {
      ctb.observe_initial(0, r, i, noise);
      mle.observe_initial(0, r, i, noise);
    } else {
      ctb.observe(0, r, i, noise);
      mle.observe(0, r, i, noise);
    }
  }
  ASSERT_EQ(bits.size(), raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) ASSERT_EQ(bits[i], static_cast<int>(raw[i]));
  EXPECT_EQ(ctb.mean(0), mle.mean(0));
}

TEST(Ctb, ConvergesToFlippedMean) {
  RngStream g(4, 0);
  CtbEstimator est(1, 1.0);
  est.observe_initial(0, coin(g, 0.9), 1, g);
  for (int i = 2; i <= 100'000; ++i) est.observe(0, coin(g, 0.9), i, g);
  EXPECT_NEAR(est.mean(0), mu_epsilon(0.9, 1.0), 0.01);
}

TEST(Ctb, HalfRewardsGiveFairCoins) {
  RngStream g(5, 0);
  CtbEstimator est(1, 2.0);
  est.observe_initial(0, 0.5, 1, g);
  for (int i = 2; i <= 100'000; ++i) est.observe(0, 0.5, i, g);
  EXPECT_NEAR(est.mean(0), 0.5, 0.01);
}

TEST(Ctb, StateHoldsOnlyFlippedBits) {
  static_assert(!CtbEstimator::kStoresRawRewards);
  RngStream g(6, 0);
  CtbEstimator est(1, 1.0);
  est.observe_initial(0, 0.37, 1, g);
  est.observe(0, 0.81, 2, g);
  // the published mean is a count of ones over pulls, whatever the raw rewards were
  EXPECT_EQ(est.mean(0), static_cast<double>(est.flipped_ones(0)) / 2.0);
  EXPECT_THROW(est.observe(0, 1.5, 3, g), std::invalid_argument);
}

TEST(Daf, FirstSwitchAfterSecondPull) {
  RngStream g(7, 0);
  DafEstimator est(1, 1.0);
  std::vector<PhaseEvent> log;
  est.set_phase_log(&log);
  est.observe_initial(0, 1.0, 1, g);
  EXPECT_EQ(est.state(0).phase, 1);
  EXPECT_EQ(est.weight(0), 1.0);
  est.observe(0, 0.0, 2, g);
  ASSERT_EQ(log.size(), 2u);
  EXPECT_EQ(est.state(0).phase, 2);
  EXPECT_EQ(est.weight(0), 1.0);
  EXPECT_EQ(log[1].phase_mean, 0.0);  // only the second reward is in the window
  EXPECT_EQ(est.mean(0), 0.0 + log[1].laplace);
}

TEST(Daf, InitialPublicationUsesUnitWindowNoise) {
  // Lap(1/eps) on the first reward; check the scale from many arms
  RngStream g(8, 0);
  const int n = 200'000;
  DafEstimator est(n, 4.0);
  double abs_sum = 0.0;
  for (int a = 0; a < n; ++a) {
    est.observe_initial(static_cast<std::size_t>(a), 0.5, a + 1, g);
    abs_sum += std::fabs(est.mean(static_cast<std::size_t>(a)) - 0.5);
  }
  // E|Lap(b)| = b = 1/4
  EXPECT_NEAR(abs_sum / n, 0.25, 0.005);
}

TEST(Daf, PowersOfTwoLadder) {
  RngStream g(9, 0);
  DafEstimator est(1, 1.0);
  std::vector<PhaseEvent> log;
  est.set_phase_log(&log);
  std::vector<double> weights;
  est.observe_initial(0, 1.0, 1, g);
  weights.push_back(est.weight(0));
  for (int t = 2; t <= 64; ++t) {
    est.observe(0, coin(g, 0.5), t, g);
    weights.push_back(est.weight(0));
  }
  // switches at counts 2, 4, 8, 16, 32, 64 with windows 1, 2, 4, 8, 16, 32
  ASSERT_EQ(log.size(), 7u);
  for (std::size_t i = 1; i < log.size(); ++i) {
    const int k = log[i].phase;
    EXPECT_EQ(k, static_cast<int>(i) + 1);
    EXPECT_EQ(log[i].count_at_switch, std::int64_t{1} << (k - 1));
    EXPECT_EQ(log[i].local_count, std::int64_t{1} << (k - 2));
  }
  EXPECT_EQ(est.ladder_violations(), 0);
  // published weights between switches stay frozen
  EXPECT_EQ(weights[2], 1.0);   // after pull 3
  EXPECT_EQ(weights[3], 2.0);   // after pull 4
  EXPECT_EQ(weights[6], 2.0);   // after pull 7
  EXPECT_EQ(weights[7], 4.0);   // after pull 8
}

TEST(Daf, VanishingNoiseGivesWindowMean) {
  RngStream rewards(10, 0);
  RngStream noise(10, 1);
  DafEstimator est(1, 1e6);
  std::vector<double> raw;
  std::vector<PhaseEvent> log;
  est.set_phase_log(&log);
  raw.push_back(coin(rewards, 0.6));
  est.observe_initial(0, raw.back(), 1, noise);
  for (int t = 2; t <= 512; ++t) {
    raw.push_back(coin(rewards, 0.6));
    est.observe(0, raw.back(), t, noise);
  }
  // closing switch at 512: window is pulls 257..512
  double s = 0.0;
  for (std::size_t i = 256; i < 512; ++i) s += raw[i];
  EXPECT_NEAR(est.mean(0), s / 256.0, 1e-4);
  EXPECT_EQ(log.back().phase_mean, s / 256.0);
}

TEST(Daf, PublishedIsWindowMeanPlusStoredDraw) {
  RngStream g(11, 0);
  DafEstimator est(3, 0.3);
  std::vector<PhaseEvent> log;
  est.set_phase_log(&log);
  for (std::size_t a = 0; a < 3; ++a) est.observe_initial(a, coin(g, 0.5), static_cast<std::int64_t>(a) + 1, g);
  for (int t = 4; t < 5000; ++t) est.observe(static_cast<std::size_t>(t % 3), coin(g, 0.5), t, g);
  for (const auto& e : log) EXPECT_NEAR(e.published, e.phase_mean + e.laplace, 1e-12);
  // the live value is the last one published for that arm
  for (std::size_t a = 0; a < 3; ++a) {
    const PhaseEvent* last = nullptr;
    for (const auto& e : log) {
      if (e.arm == a) last = &e;
    }
    ASSERT_NE(last, nullptr);
    EXPECT_EQ(est.mean(a), last->published);
    EXPECT_EQ(est.state(a).laplace, last->laplace);
  }
}

TEST(Daf, ReplaySuiteChangesExactlyOnePublishedValue) {
  const auto r = verify_daf_replay(50);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(Dpa, WeightsFollowDoublingGrid) {
  RngStream g(12, 0);
  DpaEstimator est(1);
  std::vector<double> weights;
  est.observe_initial(0, 1.0, 1, g);
  weights.push_back(est.weight(0));
  for (int t = 2; t <= 7; ++t) {
    est.observe(0, 0.0, t, g);
    weights.push_back(est.weight(0));
  }
  EXPECT_EQ(weights, (std::vector<double>{1, 2, 2, 4, 4, 4, 4}));
}

TEST(Dpa, PublishesFrozenRunningMean) {
  RngStream g(13, 0);
  DpaEstimator dpa(1);
  MleEstimator mle(1);
  std::vector<double> frozen;
  for (int t = 1; t <= 300; ++t) {
    const double r = coin(g, 0.4);
    if (t == 1) {
      dpa.observe_initial(0, r, t, g);
      mle.observe_initial(0, r, t, g);
    } else {
      dpa.observe(0, r, t, g);
      mle.observe(0, r, t, g);
    }
    if ((t & (t - 1)) == 0) frozen.push_back(mle.mean(0));  // t a power of two
    EXPECT_EQ(dpa.mean(0), frozen.back()) << "t " << t;
  }
}

TEST(Dpa, ConvergesLikeNoiselessDaf) {
  RngStream g(14, 0);
  DpaEstimator dpa(1);
  DafEstimator daf(1, 1e6);
  for (int t = 1; t <= 100'000; ++t) {
    const double r = coin(g, 0.8);
    if (t == 1) {
      dpa.observe_initial(0, r, t, g);
      daf.observe_initial(0, r, t, g);
    } else {
      dpa.observe(0, r, t, g);
      daf.observe(0, r, t, g);
    }
  }
  EXPECT_NEAR(dpa.mean(0), 0.8, 0.01);
  EXPECT_NEAR(daf.mean(0), 0.8, 0.01);
}

TEST(GaussMech, NoiseVarianceMatchesCalibration) {
  RngStream g(15, 0);
  GaussMechEstimator est(1, 1.0, 0.05);
  EXPECT_NEAR(est.noise_sigma(), 2.537, 1e-3);
  const int n = 1'000'000;
  double prev_sum = 0.0;
  double s2 = 0.0;
  for (int t = 1; t <= n; ++t) {
    est.observe(0, 0.0, t, g);
    const double sum = est.mean(0) * static_cast<double>(t);
    const double d = sum - prev_sum;
    s2 += d * d;
    prev_sum = sum;
  }
  const double var = est.noise_sigma() * est.noise_sigma();
  EXPECT_NEAR(s2 / n, var, 0.02 * var);
}

TEST(GaussMech, UnbiasedOnBernoulli) {
  RngStream g(16, 0);
  GaussMechEstimator est(1, 1.0, 0.05);
  for (int t = 1; t <= 100'000; ++t) est.observe(0, coin(g, 0.7), t, g);
  EXPECT_NEAR(est.mean(0), 0.7, 0.03);
}

TEST(GaussMech, MissingGammaIsAConfigurationError) {
  AlgoConfig cfg;
  cfg.algorithm = Algorithm::kGaussTt;
  EXPECT_THROW(cfg.validate(5), ConfigError);
  cfg.privacy.gamma = 0.05;
  EXPECT_NO_THROW(cfg.validate(5));
}

TEST(Estimators, ReplayIsDeterministic) {
  auto trace = [](std::uint64_t seed) {
    RngStream g(seed, 0);
    DafEstimator daf(2, 0.5);
    CtbEstimator ctb(2, 0.5);
    GaussMechEstimator gm(2, 0.5, 0.1);
    std::vector<double> out;
    for (int t = 1; t <= 2000; ++t) {
      const std::size_t a = static_cast<std::size_t>(t % 2);
      const double r = coin(g, 0.5);
      if (t <= 2) {
        daf.observe_initial(a, r, t, g);
        ctb.observe_initial(a, r, t, g);
        gm.observe_initial(a, r, t, g);
      } else {
        daf.observe(a, r, t, g);
        ctb.observe(a, r, t, g);
        gm.observe(a, r, t, g);
      }
      out.push_back(daf.mean(a));
      out.push_back(ctb.mean(a));
      out.push_back(gm.mean(a));
    }
    return out;
  };
  EXPECT_EQ(trace(21), trace(21));
  EXPECT_NE(trace(21), trace(22));
}

}  // namespace
}  // namespace dpbai
