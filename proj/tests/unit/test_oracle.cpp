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

// Characteristic times, lower bounds, the grid oracle and the regime fit.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dpbai/bandit.hpp"
#include "dpbai/complexity_oracle.hpp"
#include "dpbai/regime.hpp"

namespace dpbai {
namespace {

std::vector<double> named(const std::string& n) { return *named_instance_means(n); }

double relaxed_residual(const std::vector<double>& means, double eps, const Allocation& al) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < means.size(); ++a) {
    if (means[a] > means[best]) best = a;
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < means.size(); ++a) {
    if (a == best) continue;
    const double g = means[best] - means[a];
    const double cost = g * std::min(0.5 * eps, g) / (0.5 * (1.0 / al.beta + 1.0 / al.omega[a]));
    worst = std::max(worst, std::fabs(cost - 1.0 / al.T));
  }
  return worst;
}

TEST(TKlBeta, TwoArmClosedForm) {
  const auto al = t_kl_beta({1.0, 0.0}, 1.0, 0.5);
  EXPECT_NEAR(al.T, 8.0, 1e-9);
  EXPECT_NEAR(al.omega[0], 0.5, 1e-12);
  EXPECT_NEAR(al.omega[1], 0.5, 1e-9);
  // unbalanced beta: T = 2 (1/beta + 1/(1 - beta)) / Delta^2 with sigma = 1
  EXPECT_NEAR(t_kl_beta({0.5, 0.0}, 1.0, 0.25).T, 2.0 * (4.0 + 4.0 / 3.0) / 0.25, 1e-8);
}

TEST(TKlBeta, Mu1AgainstH) {
  const auto m = named("mu1");
  const double H = complexity_h(m, 0.5);
  // four gaps of 0.05 (the best arm takes the smallest) and one of 0.45
  EXPECT_NEAR(H, 0.5 * (1600.0 + 1.0 / 0.2025), 1e-9);
  EXPECT_NEAR(H, 802.469, 1e-3);
  const double T = t_kl(m, 0.5).T;
  EXPECT_LE(H, T);
  EXPECT_LE(T, 2.0 * H);
}

TEST(TKlBeta, AllocationsAreInteriorAndBalanced) {
  for (const auto& n : named_instance_labels()) {
    const auto m = named(n);
    for (double beta : {0.5, 0.3}) {
      const auto al = t_kl_beta(m, 0.5, beta);
      const double sum = std::accumulate(al.omega.begin(), al.omega.end(), 0.0);
      EXPECT_NEAR(sum, 1.0, 1e-10) << n;
      for (double w : al.omega) EXPECT_GT(w, 0.0) << n;
      EXPECT_LT(equilibrium_residual(m, 0.5, al), 1e-8) << n;
      const auto best = resolve_instance(n).require_best_arm();
      EXPECT_DOUBLE_EQ(al.omega[best], beta);
    }
  }
}

TEST(TKl, OptimisedBetaSandwich) {
  for (const auto& n : named_instance_labels()) {
    const auto m = named(n);
    const double T = t_kl(m, 0.5).T;
    const double half = t_kl_beta(m, 0.5, 0.5).T;
    EXPECT_LE(T, half * (1.0 + 1e-12)) << n;
    EXPECT_LE(half, 2.0 * T) << n;
    const double H = complexity_h(m, 0.5);
    EXPECT_LE(H, T * (1.0 + 1e-12)) << n;
    EXPECT_LE(T, 2.0 * H) << n;
  }
}

TEST(TKl, TwoArmOptimumIsHalf) {
  const auto al = t_kl({0.3, 0.8}, 1.0);
  EXPECT_NEAR(al.beta, 0.5, 1e-6);
  EXPECT_NEAR(al.T, 8.0 / 0.25, 1e-6);
}

TEST(TKl, MatchesGridOracleOnThreeArms) {
  for (const auto& m : {std::vector<double>{0.6, 0.5, 0.3}, std::vector<double>{0.9, 0.3, 0.2}}) {
    GameGrid g;
    g.sigma = 1.0;
    const double grid = 1.0 / brute_force_game(m, DivergenceKind::kKlGaussian, g);
    const double closed = t_kl(m, 1.0).T;
    EXPECT_NEAR(grid / closed, 1.0, 0.02);
  }
}

TEST(TTv, ClosedForms) {
  EXPECT_NEAR(t_tv_bernoulli(named("mu1")), 740.0 / 9.0, 1e-9);
  EXPECT_NEAR(t_tv_bernoulli(named("mu1")), 82.2222222, 1e-6);
  EXPECT_NEAR(t_tv_bernoulli(named("mu2")), 100.0, 1e-9);
  EXPECT_NEAR(t_tv_bernoulli({0.6, 0.4}), 10.0, 1e-12);
  EXPECT_THROW(t_tv_bernoulli({0.6, 0.6, 0.1}), std::invalid_argument);
}

TEST(TTv, Sandwich) {
  for (const auto& n : named_instance_labels()) {
    const auto m = named(n);
    double dmin = INFINITY;
    const double top = *std::max_element(m.begin(), m.end());
    for (double x : m) {
      if (x != top) dmin = std::min(dmin, top - x);
    }
    const double T = t_tv_bernoulli(m);
    EXPECT_GE(T, 1.0 / dmin) << n;
    EXPECT_LE(T, m.size() / dmin) << n;
  }
}

TEST(TTv, PinskerRelation) {
  for (const auto& n : named_instance_labels()) {
    const auto m = named(n);
    const auto lb = lower_bounds(m, 1.0);
    EXPECT_TRUE(lb.t_kl_is_gaussian_proxy);
    EXPECT_GE(lb.t_tv, std::sqrt(2.0 * lb.t_kl)) << n;
  }
  const std::vector<double> k3 = {0.7, 0.5, 0.2};
  const auto lb = lower_bounds(k3, 1.0);
  EXPECT_FALSE(lb.t_kl_is_gaussian_proxy);
  EXPECT_GE(lb.t_tv, std::sqrt(2.0 * lb.t_kl));
}

TEST(TKlBetaEps, LargeEpsilonIsThePlainTime) {
  for (const auto& n : named_instance_labels()) {
    const auto m = named(n);
    const double dmax = *std::max_element(m.begin(), m.end()) - *std::min_element(m.begin(), m.end());
    EXPECT_DOUBLE_EQ(t_kl_beta_eps(m, 0.5, 2.0 * dmax).T, t_kl_beta(m, 0.5, 0.5).T) << n;
  }
}

TEST(TKlBetaEps, InverseEpsilonScalingAndResidual) {
  const auto m = named("mu5");
  const double a = t_kl_beta_eps(m, 0.5, 1e-4).T * 1e-4;
  const double b = t_kl_beta_eps(m, 0.5, 1e-5).T * 1e-5;
  EXPECT_NEAR(a / b, 1.0, 1e-3);
  for (double eps : {1e-3, 0.05, 0.3, 2.0}) {
    const auto al = t_kl_beta_eps(m, 0.5, eps);
    EXPECT_LT(relaxed_residual(m, eps, al), 1e-8 * std::max(1.0, 1.0 / al.T));
    EXPECT_NEAR(std::accumulate(al.omega.begin(), al.omega.end(), 0.0), 1.0, 1e-10);
  }
}

TEST(TKlBetaEps, NonIncreasingInEpsilon) {
  for (const auto& n : {"mu1", "mu4", "mu6"}) {
    const auto m = named(n);
    double prev = INFINITY;
    for (int i = 0; i <= 60; ++i) {
      const double eps = 1e-3 * std::pow(10.0, i / 10.0);
      const double T = t_kl_beta_eps(m, 0.5, eps).T;
      EXPECT_LE(T, prev * (1.0 + 1e-12)) << n << " eps " << eps;
      prev = T;
    }
  }
}

TEST(LowerBounds, LowPrivacyLimit) {
  const auto m = named("mu1");
  const auto lb = lower_bounds(m, 1e6);
  EXPECT_EQ(lb.lb_global, lb.t_kl);
  EXPECT_EQ(lb.lb_local, lb.t_kl);
}

TEST(LowerBounds, GlobalHighPrivacyOnMu2) {
  const auto lb = lower_bounds(named("mu2"), 0.01);
  EXPECT_NEAR(lb.lb_global, 1e4, 1e-6);
}

TEST(LowerBounds, LocalSwitchForTightPinsker) {
  EXPECT_NEAR(solve_c_local(2.0), 0.582, 0.01);
  // the Gaussian proxy has T_TV2 = T_KL(sigma = 1) / 2 = 2 T_KL(sigma = 1/2)
  const auto lb = lower_bounds(named("mu1"), 1.0);
  EXPECT_NEAR(lb.t_tv2 / lb.t_kl, 2.0, 1e-6);
  EXPECT_NEAR(lb.switch_local, 0.582, 0.01);
  EXPECT_NEAR(lb.switch_global, lb.t_tv / lb.t_kl, 1e-15);
}

TEST(GridOracle, TotalVariationTwoArms) {
  const double v = brute_force_game({0.6, 0.4}, DivergenceKind::kTv);
  EXPECT_NEAR(1.0 / v, 10.0, 0.2);
}

TEST(GridOracle, GaussianTwoArms) {
  GameGrid g;
  g.sigma = 1.0;
  const double v = brute_force_game({1.0, 0.0}, DivergenceKind::kKlGaussian, g);
  EXPECT_NEAR(1.0 / v, 8.0, 0.16);
}

TEST(GridOracle, MixedKindDegeneratesAtLargeEpsilon) {
  const std::vector<double> m = {0.7, 0.4, 0.3};
  GameGrid g;
  g.epsilon = 1e6;
  const double mixed = brute_force_game(m, DivergenceKind::kMinSumKlEpsSumTv, g);
  const double kl = brute_force_game(m, DivergenceKind::kKlBernoulli, g);
  EXPECT_NEAR(mixed / kl, 1.0, 0.02);
}

TEST(GridOracle, ClosedFormTvOnThreeArms) {
  for (const auto& m : {std::vector<double>{0.7, 0.5, 0.2}, std::vector<double>{0.55, 0.45, 0.4}}) {
    const double grid = 1.0 / brute_force_game(m, DivergenceKind::kTv);
    EXPECT_NEAR(grid / t_tv_bernoulli(m), 1.0, 0.02);
  }
}

TEST(GridOracle, RefusesLargeInstances) {
  EXPECT_THROW(brute_force_game(named("mu1"), DivergenceKind::kTv), std::invalid_argument);
}

TEST(ComplexityReport, FieldsAreConsistent) {
  const auto r = complexity_report("mu1", named("mu1"), 0.1);
  EXPECT_EQ(r.T_KL_kind, "gaussian_proxy_sigma_0.5");
  EXPECT_NEAR(r.T_TV, 740.0 / 9.0, 1e-9);
  EXPECT_NEAR(r.lb_global, std::max(r.T_KL, r.T_TV / 0.1), 1e-9);
  EXPECT_NEAR(std::accumulate(r.omega_star.begin(), r.omega_star.end(), 0.0), 1.0, 1e-9);
  EXPECT_NEAR(std::accumulate(r.omega_star_eps.begin(), r.omega_star_eps.end(), 0.0), 1.0, 1e-9);
  EXPECT_NEAR(r.c_eps, c_local(0.1), 0.0);
}

TEST(RegimeFit, RecoversConstructedKnee) {
  std::vector<RegimePoint> pts;
  for (double e : {0.01, 0.03, 0.1, 0.3, 0.5, 0.8, 1.0, 2.0, 5.0, 10.0, 100.0}) {
    pts.push_back({e, e < 1.0 ? 500.0 / e : 500.0});
  }
  const auto knee = regime_split(pts, 1.0);
  ASSERT_TRUE(knee.has_value());
  EXPECT_NEAR(*knee, 1.0, 0.1);

  std::vector<RegimePoint> local;
  for (double e : {0.05, 0.1, 0.2, 0.5, 1.0, 3.0, 10.0, 100.0}) {
    local.push_back({e, e < 2.0 ? 40.0 * 4.0 / (e * e) : 40.0});
  }
  const auto k2 = regime_split(local, 2.0);
  ASSERT_TRUE(k2.has_value());
  EXPECT_NEAR(*k2, 2.0, 0.2);
}

TEST(RegimeFit, TooFewPointsGivesNoKnee) {
  EXPECT_FALSE(regime_split({{0.1, 10.0}, {1.0, 1.0}, {10.0, 1.0}}, 1.0).has_value());
  // non-positive entries are dropped before counting
  EXPECT_FALSE(regime_split({{0.1, 10.0}, {1.0, 1.0}, {10.0, 1.0}, {-1.0, 3.0}}, 1.0).has_value());
}

}  // namespace
}  // namespace dpbai
