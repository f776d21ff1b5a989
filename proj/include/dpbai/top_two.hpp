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

#ifndef DPBAI_TOP_TWO_HPP_
#define DPBAI_TOP_TWO_HPP_

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpbai/bandit.hpp"
#include "dpbai/estimators.hpp"
#include "dpbai/glr.hpp"
#include "dpbai/privacy.hpp"
#include "dpbai/rng.hpp"
#include "dpbai/special_functions.hpp"

namespace dpbai {

enum class Algorithm { kTtucb, kCtbTt, kAdapTt, kAdapTtStar, kGaussTt, kDpaTt, kDpse };

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kTtucb: return "ttucb";
    case Algorithm::kCtbTt: return "ctb_tt";
    case Algorithm::kAdapTt: return "adap_tt";
    case Algorithm::kAdapTtStar: return "adap_tt_star";
    case Algorithm::kGaussTt: return "gauss_tt";
    case Algorithm::kDpaTt: return "dpa_tt";
    case Algorithm::kDpse: return "dpse";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kTtucb, Algorithm::kCtbTt, Algorithm::kAdapTt, Algorithm::kAdapTtStar,
                      Algorithm::kGaussTt, Algorithm::kDpaTt, Algorithm::kDpse}) {
    if (algorithm_name(a) == name) return a;
  }
  return std::nullopt;
}

/// Algorithms whose output does not depend on epsilon.
inline bool is_nonprivate(Algorithm a) { return a == Algorithm::kTtucb || a == Algorithm::kDpaTt; }

/// Local (per-reward) mechanisms as opposed to global (central) ones.
inline bool is_local_private(Algorithm a) { return a == Algorithm::kCtbTt || a == Algorithm::kGaussTt; }

enum class BonusKind { kBG, kBGEps };

struct AlgoConfig {
  Algorithm algorithm = Algorithm::kTtucb;
  double beta = 0.5;
  double s = 1.2;
  double alpha = 1.2;
  double delta = 0.01;
  PrivacyBudget privacy{};
  double sigma = 0.5;
  std::int64_t max_steps = 10'000'000;
  ThresholdMode threshold_mode = ThresholdMode::kExact;

  void validate(std::size_t num_arms) const {
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
    if (!(s > 1.0 && alpha > 1.0)) throw ConfigError("s and alpha must be > 1");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (!(sigma > 0.0)) throw ConfigError("sigma must be > 0");
    if (max_steps < static_cast<std::int64_t>(num_arms) + 1) throw ConfigError("max_steps must be >= K + 1");
    if (!is_nonprivate(algorithm)) {
      try {
        privacy.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (algorithm == Algorithm::kGaussTt && !privacy.gamma) {
      throw ConfigError("gauss_tt needs the approximate-DP parameter gamma");
    }
  }
};

/// What each Top Two instantiation plugs into the loop.
struct TopTwoRecipe {
  EstimatorKind estimator;
  CostKind cost;
  ThresholdKind threshold;
  BonusKind bonus;
};

inline TopTwoRecipe recipe_for(Algorithm a) {
  switch (a) {
    case Algorithm::kTtucb:
      return {EstimatorKind::kMle, CostKind::kGauss, ThresholdKind::kNonPrivate, BonusKind::kBG};
    case Algorithm::kCtbTt:
      return {EstimatorKind::kCtb, CostKind::kGauss, ThresholdKind::kNonPrivate, BonusKind::kBG};
    case Algorithm::kAdapTt:
      return {EstimatorKind::kDaf, CostKind::kGauss, ThresholdKind::kV1, BonusKind::kBGEps};
    case Algorithm::kAdapTtStar:
      return {EstimatorKind::kDaf, CostKind::kGaussEps, ThresholdKind::kV2, BonusKind::kBGEps};
    case Algorithm::kGaussTt:
      return {EstimatorKind::kGauss, CostKind::kGauss, ThresholdKind::kNonPrivate, BonusKind::kBG};
    case Algorithm::kDpaTt:
      return {EstimatorKind::kDpa, CostKind::kGauss, ThresholdKind::kNonPrivate, BonusKind::kBG};
    case Algorithm::kDpse: break;
  }
  throw ConfigError("dpse is not a Top Two algorithm");
}

/// Private mechanisms are calibrated to rewards in [0, 1].
inline bool needs_unit_rewards(Algorithm a) { return a != Algorithm::kTtucb && a != Algorithm::kDpaTt; }

/// Sub-Gaussian proxy used in costs, bonuses and thresholds. For gauss_tt
/// the learner sees reward + N(0, sigma_mech^2), hence the wider proxy.
inline double effective_sigma(const AlgoConfig& cfg) {
  if (cfg.algorithm == Algorithm::kGaussTt) {
    const double sm = gaussian_mechanism_sigma(cfg.privacy.epsilon, *cfg.privacy.gamma);
    return std::sqrt(sm * sm + cfg.sigma * cfg.sigma);
  }
  return cfg.sigma;
}

struct RunRecord {
  std::string algorithm;
  std::string instance;
  std::optional<double> epsilon;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t run_idx = 0;
  std::int64_t tau = 0;
  std::size_t recommended = 0;  // 0-based here, 1-based in CSV output
  bool correct = false;
  bool censored = false;
  double ms = 0.0;
  // diagnostics, not persisted
  std::int64_t tracking_violations = 0;
  std::int64_t ladder_violations = 0;
  std::int64_t phase_switches = 0;
};

// ---------------------------------------------------------------------------
// Sampling-rule pieces

inline double bonus_bg(double weight, double log_total, double sigma, double s, double alpha) {
  return std::sqrt(2.0 * sigma * sigma * alpha * (1.0 + s) * log_total / weight);
}

inline double bonus_bg_eps(double weight, double epsilon) {
  const double k = k_log2(weight);
  return std::sqrt(k / weight) + k / (epsilon * weight);
}

/// argmax of mean + bonus, lowest index on ties. `weights` are the ones the
/// bonus reads (published weights); for b_g their sum enters the log.
inline std::size_t ucb_leader(const std::vector<double>& means, const std::vector<double>& weights,
                              BonusKind kind, double s, double alpha, double sigma, double epsilon) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double log_total = std::log(total);
  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < means.size(); ++a) {
    const double b = kind == BonusKind::kBG ? bonus_bg(weights[a], log_total, sigma, s, alpha)
                                            : bonus_bg_eps(weights[a], epsilon);
    const double v = means[a] + b;
    if (v > best_val) {
      best_val = v;
      best = a;
    }
  }
  return best;
}

/// argmin over a != leader of W(leader, a) computed on global counts.
inline std::size_t tc_challenger(std::size_t leader, const std::vector<double>& means,
                                 const std::vector<double>& counts, CostKind kind, double sigma,
                                 double epsilon) {
  std::size_t best = leader == 0 ? 1 : 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < means.size(); ++a) {
    if (a == leader) continue;
    const double w = transport_cost(kind, means[leader], means[a], counts[leader], counts[a], epsilon, sigma);
    if (w < best_val) {
      best_val = w;
      best = a;
    }
  }
  return best;
}

struct TrackingState {
  std::vector<std::int64_t> leader_count;  // L
  std::vector<std::int64_t> self_count;    // pulls of a while a led
  double beta = 0.5;

  TrackingState(std::size_t num_arms, double b) : leader_count(num_arms, 0), self_count(num_arms, 0), beta(b) {}

  double deviation(std::size_t a) const {
    return static_cast<double>(self_count[a]) - beta * static_cast<double>(leader_count[a]);
  }
};

/// beta-tracking: bump L for the leader first, then pull it iff its
/// self-count is at most beta * L.
inline std::size_t track_next(std::size_t leader, std::size_t challenger, TrackingState& st) {
  st.leader_count[leader] += 1;
  if (static_cast<double>(st.self_count[leader]) <= st.beta * static_cast<double>(st.leader_count[leader])) {
    st.self_count[leader] += 1;
    return leader;
  }
  return challenger;
}

inline bool tracking_within_bounds(const TrackingState& st, std::size_t a) {
  const double d = st.deviation(a);
  return d >= -0.5 && d <= 1.0;
}

// ---------------------------------------------------------------------------
// Stopping rule with the caching the hot loop needs.

class StoppingRule {
 public:
  StoppingRule(CostKind cost, ThresholdKind threshold, ThresholdMode mode, double delta,
               double epsilon, double sigma, std::size_t num_arms)
      : cost_(cost), threshold_(threshold), mode_(mode), delta_(delta), epsilon_(epsilon),
        sigma_(sigma), num_arms_(num_arms), loglog_w_(num_arms, -1.0), loglog_v_(num_arms, 0.0),
        pairs_(num_arms * num_arms) {
    validate_pairing(cost, threshold);
    if (threshold == ThresholdKind::kNonPrivate) core_ = threshold_nonprivate_core(delta, num_arms, mode);
  }

  double cost(double mu_a, double mu_b, double w_a, double w_b) const {
    return transport_cost(cost_, mu_a, mu_b, w_a, w_b, epsilon_, sigma_);
  }

  double threshold(std::size_t a, std::size_t b, double mu_a, double mu_b, double w_a, double w_b) {
    switch (threshold_) {
      case ThresholdKind::kNonPrivate: return core_ + loglog(a, w_a) + loglog(b, w_b);
      case ThresholdKind::kV1: {
        PairCache& pc = pair(a, b, w_a, w_b);
        if (std::isnan(pc.low)) {
          pc.low = threshold_private_v1(w_a, w_b, delta_, epsilon_, sigma_, num_arms_, mode_);
        }
        return pc.low;
      }
      case ThresholdKind::kV2: {
        PairCache& pc = pair(a, b, w_a, w_b);
        const double gap = std::max(0.0, mu_a - mu_b);
        if (gap < 0.5 * epsilon_) {
          if (std::isnan(pc.low)) {
            pc.low = threshold_private_v2_low(w_a, w_b, delta_, epsilon_, sigma_, num_arms_, mode_);
          }
          return pc.low;
        }
        if (std::isnan(pc.high)) {
          pc.high = threshold_private_v2_high(w_a, w_b, delta_, epsilon_, sigma_, num_arms_, mode_);
        }
        return pc.high;
      }
    }
    return 0.0;
  }

  /// True iff W(a, b) >= c(a, b) for every b != a. Exits at the first rival
  /// that fails.
  bool should_stop(std::size_t a, const std::vector<double>& means, const std::vector<double>& weights) {
    for (std::size_t b = 0; b < num_arms_; ++b) {
      if (b == a) continue;
      const double w = cost(means[a], means[b], weights[a], weights[b]);
      if (w <= 0.0) return false;
      if (w < threshold(a, b, means[a], means[b], weights[a], weights[b])) return false;
    }
    return true;
  }

 private:
  struct PairCache {
    double w_a = -1.0;
    double w_b = -1.0;
    double low = std::numeric_limits<double>::quiet_NaN();
    double high = std::numeric_limits<double>::quiet_NaN();
  };

  double loglog(std::size_t a, double w) {
    if (loglog_w_[a] != w) {
      loglog_w_[a] = w;
      loglog_v_[a] = 2.0 * std::log(4.0 + std::log(w));
    }
    return loglog_v_[a];
  }

  PairCache& pair(std::size_t a, std::size_t b, double w_a, double w_b) {
    PairCache& pc = pairs_[a * num_arms_ + b];
    if (pc.w_a != w_a || pc.w_b != w_b) {
      pc.w_a = w_a;
      pc.w_b = w_b;
      pc.low = std::numeric_limits<double>::quiet_NaN();
      pc.high = std::numeric_limits<double>::quiet_NaN();
    }
    return pc;
  }

  CostKind cost_;
  ThresholdKind threshold_;
  ThresholdMode mode_;
  double delta_;
  double epsilon_;
  double sigma_;
  std::size_t num_arms_;
  double core_ = 0.0;
  std::vector<double> loglog_w_;
  std::vector<double> loglog_v_;
  std::vector<PairCache> pairs_;
};

// ---------------------------------------------------------------------------
// The loop

/// Per-step view handed to observers (tests, the verify suite).
template <typename Estimator>
struct StepView {
  std::int64_t t;  // pulls so far, before this step's pull
  std::size_t leader;
  std::size_t challenger;
  std::size_t pulled;
  const TrackingState& tracking;
  const Estimator& estimator;
  const std::vector<double>& counts;
};

struct NullObserver {
  template <typename View>
  void operator()(const View&) const noexcept {}
};

/// Default reward source: the instance itself.
struct InstanceRewards {
  const BanditInstance& instance;
  double operator()(std::size_t arm, RngStream& rng) const { return instance.sample_reward(arm, rng); }
};

/// Runs the Top Two loop with a concrete estimator. `rewards(arm, rng)`
/// produces raw rewards; the estimator adds whatever privacy noise it uses
/// from the same stream.
template <typename Estimator, typename RewardFn, typename Observer = NullObserver>
RunRecord run_top_two(const AlgoConfig& cfg, const BanditInstance& instance, Estimator& est,
                      RewardFn&& rewards, RngStream& rng, Observer&& observer = {}) {
  const auto start_clock = std::chrono::steady_clock::now();
  const std::size_t K = instance.num_arms();
  cfg.validate(K);
  const TopTwoRecipe recipe = recipe_for(cfg.algorithm);
  const double sigma = effective_sigma(cfg);
  const double eps = cfg.privacy.epsilon;
  StoppingRule stopping(recipe.cost, recipe.threshold, cfg.threshold_mode, cfg.delta, eps, sigma, K);

  std::vector<double> means(K), weights(K), counts(K, 0.0);
  TrackingState tracking(K, cfg.beta);
  RunRecord rec;
  rec.algorithm = std::string(algorithm_name(cfg.algorithm));
  rec.instance = instance.label();
  if (!is_nonprivate(cfg.algorithm)) rec.epsilon = eps;
  rec.delta = cfg.delta;
  rec.seed = rng.seed();
  rec.run_idx = rng.stream_id();

  std::int64_t t = 0;
  for (std::size_t a = 0; a < K; ++a) {
    ++t;
    est.observe_initial(a, rewards(a, rng), t, rng);
    counts[a] = 1.0;
  }
  auto refresh = [&] {
    for (std::size_t a = 0; a < K; ++a) {
      means[a] = est.mean(a);
      weights[a] = est.weight(a);
    }
  };
  refresh();

  double bonus_total = 0.0;
  for (double w : weights) bonus_total += w;
  std::vector<double> bonus_eps_cache(K, -1.0), bonus_eps_w(K, -1.0);

  bool stopped = false;
  std::size_t recommended = 0;
  for (;;) {
    recommended = argmax_lowest(means);
    if (stopping.should_stop(recommended, means, weights)) {
      stopped = true;
      break;
    }
    if (t >= cfg.max_steps) break;

    // UCB leader
    std::size_t leader = 0;
    {
      double best_val = -std::numeric_limits<double>::infinity();
      const double log_total = recipe.bonus == BonusKind::kBG ? std::log(bonus_total) : 0.0;
      for (std::size_t a = 0; a < K; ++a) {
        double b;
        if (recipe.bonus == BonusKind::kBG) {
          b = bonus_bg(weights[a], log_total, sigma, cfg.s, cfg.alpha);
        } else {
          if (bonus_eps_w[a] != weights[a]) {
            bonus_eps_w[a] = weights[a];
            bonus_eps_cache[a] = bonus_bg_eps(weights[a], eps);
          }
          b = bonus_eps_cache[a];
        }
        const double v = means[a] + b;
        if (v > best_val) {
          best_val = v;
          leader = a;
        }
      }
    }
    const std::size_t challenger = tc_challenger(leader, means, counts, recipe.cost, sigma, eps);
    const std::size_t arm = track_next(leader, challenger, tracking);
    if (!tracking_within_bounds(tracking, leader)) ++rec.tracking_violations;

    observer(StepView<Estimator>{t, leader, challenger, arm, tracking, est, counts});

    ++t;
    const double old_w = weights[arm];
    est.observe(arm, rewards(arm, rng), t, rng);
    counts[arm] += 1.0;
    means[arm] = est.mean(arm);
    weights[arm] = est.weight(arm);
    bonus_total += weights[arm] - old_w;
  }

  rec.tau = t;
  rec.recommended = recommended;
  rec.censored = !stopped;
  const auto best = instance.best_arm();
  rec.correct = best && *best == recommended;
  rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_clock).count();
  return rec;
}

/// Builds the estimator for `cfg.algorithm` and runs it on `instance`.
template <typename Observer = NullObserver>
RunRecord run_bai(const AlgoConfig& cfg, const BanditInstance& instance, RngStream& rng,
                  Observer&& observer = {}) {
  const std::size_t K = instance.num_arms();
  cfg.validate(K);
  const TopTwoRecipe recipe = recipe_for(cfg.algorithm);
  if (needs_unit_rewards(cfg.algorithm) && !instance.rewards_in_unit_interval()) {
    throw ConfigError(std::string(algorithm_name(cfg.algorithm)) + " needs rewards in [0, 1]");
  }
  InstanceRewards rewards{instance};
  const double eps = cfg.privacy.epsilon;
  switch (recipe.estimator) {
    case EstimatorKind::kMle: {
      MleEstimator est(K);
      return run_top_two(cfg, instance, est, rewards, rng, observer);
    }
    case EstimatorKind::kCtb: {
      CtbEstimator est(K, eps);
      return run_top_two(cfg, instance, est, rewards, rng, observer);
    }
    case EstimatorKind::kDaf: {
      DafEstimator est(K, eps);
      RunRecord rec = run_top_two(cfg, instance, est, rewards, rng, observer);
      rec.ladder_violations = est.ladder_violations();
      rec.phase_switches = est.phase_switches();
      return rec;
    }
    case EstimatorKind::kDpa: {
      DpaEstimator est(K);
      return run_top_two(cfg, instance, est, rewards, rng, observer);
    }
    case EstimatorKind::kGauss: {
      GaussMechEstimator est(K, eps, *cfg.privacy.gamma);
      return run_top_two(cfg, instance, est, rewards, rng, observer);
    }
  }
  throw ConfigError("unknown estimator");
}

}  // namespace dpbai

#endif  // DPBAI_TOP_TWO_HPP_
