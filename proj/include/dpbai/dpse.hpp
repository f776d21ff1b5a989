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

#ifndef DPBAI_DPSE_HPP_
#define DPBAI_DPSE_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dpbai/bandit.hpp"
#include "dpbai/privacy.hpp"
#include "dpbai/rng.hpp"
#include "dpbai/top_two.hpp"

namespace dpbai {

/// Private successive elimination with fixed-confidence stopping.
///
/// Epoch r pulls every surviving arm R_r = 2^r times, publishes the epoch
/// mean of each (earlier epochs are forgotten) plus Lap(1/(eps R_r)), and
/// drops every arm whose upper bound sits below the best lower bound. The
/// confidence radius
///
///   CB_r = sqrt(L_r / (2 R_r)) + L_r / (eps R_r),   L_r = ln(8 K r^2 / delta)
///
/// is Hoeffding plus a Laplace tail, union-bounded over arms and epochs.
struct DpseEpoch {
  int epoch;
  std::int64_t per_arm_pulls;
  double radius;
  std::vector<std::size_t> active;    // survivors entering the epoch
  std::vector<double> raw_means;      // noiseless epoch means, aligned with `active`
  std::vector<double> private_means;  // what the elimination test sees
  std::int64_t window_begin;          // first pull index of the epoch (1-based)
};

struct DpseState {
  std::vector<std::size_t> active;
  int epoch = 0;
  std::int64_t per_arm_pulls = 0;
  std::vector<double> private_means;  // indexed by arm; NaN until first published
};

inline double dpse_radius(int epoch, std::int64_t pulls, std::size_t num_arms, double epsilon, double delta) {
  const double L = std::log(8.0 * num_arms * static_cast<double>(epoch) * epoch / delta);
  const double R = static_cast<double>(pulls);
  return std::sqrt(L / (2.0 * R)) + L / (epsilon * R);
}

struct NullEpochObserver {
  void operator()(const DpseEpoch&) const noexcept {}
};

template <typename RewardFn, typename EpochObserver = NullEpochObserver>
RunRecord dpse_run_with(const BanditInstance& instance, double epsilon, double delta, RngStream& rng,
                        std::int64_t max_steps, RewardFn&& rewards, EpochObserver&& observer = {}) {
  const auto start_clock = std::chrono::steady_clock::now();
  if (!(epsilon > 0.0)) throw ConfigError("dpse needs epsilon > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!instance.rewards_in_unit_interval()) throw ConfigError("dpse needs rewards in [0, 1]");
  const std::size_t K = instance.num_arms();

  DpseState st;
  for (std::size_t a = 0; a < K; ++a) st.active.push_back(a);
  st.private_means.assign(K, std::numeric_limits<double>::quiet_NaN());

  RunRecord rec;
  rec.algorithm = "dpse";
  rec.instance = instance.label();
  rec.epsilon = epsilon;
  rec.delta = delta;
  rec.seed = rng.seed();
  rec.run_idx = rng.stream_id();

  std::int64_t t = 0;
  bool stopped = false;
  while (st.active.size() > 1) {
    st.epoch += 1;
    st.per_arm_pulls = std::int64_t{1} << st.epoch;
    const std::int64_t need = st.per_arm_pulls * static_cast<std::int64_t>(st.active.size());
    if (t + need > max_steps) break;

    DpseEpoch ep{st.epoch, st.per_arm_pulls, dpse_radius(st.epoch, st.per_arm_pulls, K, epsilon, delta),
                 st.active, {}, {}, t + 1};
    const double scale = 1.0 / (epsilon * static_cast<double>(st.per_arm_pulls));
    for (std::size_t a : st.active) {
      double sum = 0.0;
      for (std::int64_t i = 0; i < st.per_arm_pulls; ++i) sum += rewards(a, rng);
      t += st.per_arm_pulls;
      const double raw = sum / static_cast<double>(st.per_arm_pulls);
      const double priv = raw + laplace_sample(scale, rng);
      ep.raw_means.push_back(raw);
      ep.private_means.push_back(priv);
      st.private_means[a] = priv;
    }
    double best_lower = -std::numeric_limits<double>::infinity();
    for (double m : ep.private_means) best_lower = std::max(best_lower, m - ep.radius);
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < st.active.size(); ++i) {
      if (!(ep.private_means[i] + ep.radius < best_lower)) survivors.push_back(st.active[i]);
    }
    observer(ep);
    st.active = std::move(survivors);
  }
  if (st.active.size() == 1) stopped = true;

  // censored runs recommend the best surviving published mean
  std::size_t recommended = st.active.front();
  for (std::size_t a : st.active) {
    const double m = st.private_means[a];
    const double cur = st.private_means[recommended];
    if (!std::isnan(m) && (std::isnan(cur) || m > cur)) recommended = a;
  }
  rec.tau = t;
  rec.recommended = recommended;
  rec.censored = !stopped;
  const auto best = instance.best_arm();
  rec.correct = best && *best == recommended;
  rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_clock).count();
  return rec;
}

inline RunRecord dpse_run(const BanditInstance& instance, double epsilon, double delta, RngStream& rng,
                          std::int64_t max_steps = 10'000'000) {
  return dpse_run_with(instance, epsilon, delta, rng, max_steps, InstanceRewards{instance});
}

/// Dispatches on config: dpse or any Top Two variant.
inline RunRecord run_algorithm(const AlgoConfig& cfg, const BanditInstance& instance, RngStream& rng) {
  if (cfg.algorithm == Algorithm::kDpse) {
    return dpse_run(instance, cfg.privacy.epsilon, cfg.delta, rng, cfg.max_steps);
  }
  return run_bai(cfg, instance, rng);
}

}  // namespace dpbai

#endif  // DPBAI_DPSE_HPP_
