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

#ifndef DPBAI_ESTIMATORS_HPP_
#define DPBAI_ESTIMATORS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dpbai/privacy.hpp"

// Mean estimators plugged into the Top Two loop. All of them share the
// same surface:
//
//   observe_initial(arm, reward, step, rng)   the one pull per arm at start
//   observe(arm, reward, step, rng)           every later pull
//   mean(arm), weight(arm)                    the published pair
//   count(arm)                                true number of pulls
//
// `rng` is only touched for privacy noise, so replaying the same rewards
// against a stream in the same state reproduces every published value.

namespace dpbai {

enum class EstimatorKind { kMle, kCtb, kDaf, kDpa, kGauss };

inline std::string_view estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::kMle: return "mle";
    case EstimatorKind::kCtb: return "ctb";
    case EstimatorKind::kDaf: return "daf";
    case EstimatorKind::kDpa: return "dpa";
    case EstimatorKind::kGauss: return "gauss";
  }
  return "?";
}

class MleEstimator {
 public:
  explicit MleEstimator(std::size_t num_arms) : counts_(num_arms, 0), sums_(num_arms, 0.0) {}

  template <typename G>
  void observe_initial(std::size_t arm, double reward, std::int64_t step, G& rng) {
    observe(arm, reward, step, rng);
  }

  template <typename G>
  void observe(std::size_t arm, double reward, std::int64_t /*step*/, G& /*rng*/) {
    counts_[arm] += 1;
    sums_[arm] += reward;
  }

  double mean(std::size_t arm) const { return sums_[arm] / static_cast<double>(counts_[arm]); }
  double weight(std::size_t arm) const { return static_cast<double>(counts_[arm]); }
  std::int64_t count(std::size_t arm) const { return counts_[arm]; }
  std::size_t num_arms() const { return counts_.size(); }
  double sum(std::size_t arm) const { return sums_[arm]; }

 private:
  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
};

/// Convert-to-Bernoulli: each reward is passed through randomized response
/// before it reaches the learner. Only the flipped bits are kept.
class CtbEstimator {
 public:
  CtbEstimator(std::size_t num_arms, double epsilon)
      : rr_(epsilon), counts_(num_arms, 0), ones_(num_arms, 0) {}

  template <UnitUniformSource G>
  void observe_initial(std::size_t arm, double reward, std::int64_t step, G& rng) {
    observe(arm, reward, step, rng);
  }

  template <UnitUniformSource G>
  void observe(std::size_t arm, double reward, std::int64_t /*step*/, G& rng) {
    const int bit = rr_.flip(reward, rng);
    counts_[arm] += 1;
    ones_[arm] += bit;
    if (flip_log_ != nullptr) flip_log_->push_back(bit);
  }

  double mean(std::size_t arm) const {
    return static_cast<double>(ones_[arm]) / static_cast<double>(counts_[arm]);
  }
  double weight(std::size_t arm) const { return static_cast<double>(counts_[arm]); }
  std::int64_t count(std::size_t arm) const { return counts_[arm]; }
  std::size_t num_arms() const { return counts_.size(); }

  // inspection: the whole state is (count, number of ones) per arm
  std::int64_t flipped_ones(std::size_t arm) const { return ones_[arm]; }
  static constexpr bool kStoresRawRewards = false;

  /// Every flipped bit, in order, gets appended here when set.
  void set_flip_log(std::vector<int>* log) { flip_log_ = log; }

 private:
  RandomizedResponse rr_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> ones_;
  std::vector<int>* flip_log_ = nullptr;
};

/// Additive Gaussian noise on every reward, calibrated for (eps, gamma)-DP.
class GaussMechEstimator {
 public:
  GaussMechEstimator(std::size_t num_arms, double epsilon, double gamma)
      : noise_sigma_(gaussian_mechanism_sigma(epsilon, gamma)),
        counts_(num_arms, 0),
        sums_(num_arms, 0.0) {}

  template <typename G>
  void observe_initial(std::size_t arm, double reward, std::int64_t step, G& rng) {
    observe(arm, reward, step, rng);
  }

  template <typename G>
  void observe(std::size_t arm, double reward, std::int64_t /*step*/, G& rng) {
    counts_[arm] += 1;
    sums_[arm] += reward + noise_sigma_ * rng.normal();
  }

  double mean(std::size_t arm) const { return sums_[arm] / static_cast<double>(counts_[arm]); }
  double weight(std::size_t arm) const { return static_cast<double>(counts_[arm]); }
  std::int64_t count(std::size_t arm) const { return counts_[arm]; }
  std::size_t num_arms() const { return counts_.size(); }
  double noise_sigma() const { return noise_sigma_; }

 private:
  double noise_sigma_;
  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
};

/// One per-arm phase switch, for replay and ladder checks.
struct PhaseEvent {
  std::size_t arm;
  int phase;                  // phase index k after the switch
  std::int64_t step;          // time of the switch
  std::int64_t count_at_switch;
  std::int64_t local_count;   // N-tilde of the new phase
  double phase_mean;          // noiseless mean over the closed window
  double laplace;             // the draw that was added
  double published;
};

struct DafArmState {
  int phase = 0;
  std::int64_t phase_start_step = 0;
  std::int64_t count = 0;
  std::int64_t count_at_phase_start = 0;
  std::int64_t local_count = 0;
  double phase_sum = 0.0;
  double published_mean = 0.0;
  double laplace = 0.0;
};

/// Doubling-and-forgetting: each arm runs its own geometric phases. When the
/// arm's count doubles, the mean of the rewards it collected since the last
/// switch is published with Laplace noise of scale 1/(eps * window size);
/// older rewards are dropped. Between switches nothing published changes.
class DafEstimator {
 public:
  DafEstimator(std::size_t num_arms, double epsilon) : epsilon_(epsilon), arms_(num_arms) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("DAF needs epsilon > 0");
  }

  template <UnitUniformSource G>
  void observe_initial(std::size_t arm, double reward, std::int64_t step, G& rng) {
    auto& s = arms_[arm];
    s.phase = 1;
    s.count = 1;
    s.count_at_phase_start = 1;
    s.local_count = 1;
    // phase 1 opens once every arm has been tried
    s.phase_start_step = static_cast<std::int64_t>(arms_.size()) + 1;
    s.phase_sum = 0.0;
    s.laplace = laplace_sample(1.0 / epsilon_, rng);
    s.published_mean = reward + s.laplace;
    if (log_ != nullptr) log_->push_back({arm, 1, step, 1, 1, reward, s.laplace, s.published_mean});
  }

  template <UnitUniformSource G>
  void observe(std::size_t arm, double reward, std::int64_t step, G& rng) {
    auto& s = arms_[arm];
    s.count += 1;
    s.phase_sum += reward;
    if (s.count >= 2 * s.count_at_phase_start) switch_phase(arm, step, rng);
  }

  double mean(std::size_t arm) const { return arms_[arm].published_mean; }
  double weight(std::size_t arm) const { return static_cast<double>(arms_[arm].local_count); }
  std::int64_t count(std::size_t arm) const { return arms_[arm].count; }
  std::size_t num_arms() const { return arms_.size(); }
  const DafArmState& state(std::size_t arm) const { return arms_[arm]; }

  /// Switches where count or window size left the 2^{k-1} / 2^{k-2} ladder.
  std::int64_t ladder_violations() const { return ladder_violations_; }
  std::int64_t phase_switches() const { return switches_; }

  void set_phase_log(std::vector<PhaseEvent>* log) { log_ = log; }

 private:
  template <UnitUniformSource G>
  void switch_phase(std::size_t arm, std::int64_t step, G& rng) {
    auto& s = arms_[arm];
    const std::int64_t window = s.count - s.count_at_phase_start;
    const double phase_mean = s.phase_sum / static_cast<double>(window);
    s.phase += 1;
    s.local_count = window;
    s.count_at_phase_start = s.count;
    s.phase_start_step = step;
    s.laplace = laplace_sample(1.0 / (epsilon_ * static_cast<double>(window)), rng);
    s.published_mean = phase_mean + s.laplace;
    s.phase_sum = 0.0;
    ++switches_;
    const std::int64_t expect_count = std::int64_t{1} << (s.phase - 1);
    const std::int64_t expect_window = std::int64_t{1} << (s.phase - 2);
    if (s.count != expect_count || window != expect_window) ++ladder_violations_;
    if (log_ != nullptr) {
      log_->push_back({arm, s.phase, step, s.count, window, phase_mean, s.laplace, s.published_mean});
    }
  }

  double epsilon_;
  std::vector<DafArmState> arms_;
  std::int64_t ladder_violations_ = 0;
  std::int64_t switches_ = 0;
  std::vector<PhaseEvent>* log_ = nullptr;
};

/// Doubling grid without noise or forgetting: at each switch the full
/// running mean is published together with the count at that time.
class DpaEstimator {
 public:
  explicit DpaEstimator(std::size_t num_arms)
      : counts_(num_arms, 0), sums_(num_arms, 0.0), anchor_(num_arms, 0),
        published_mean_(num_arms, 0.0) {}

  template <typename G>
  void observe_initial(std::size_t arm, double reward, std::int64_t /*step*/, G& /*rng*/) {
    counts_[arm] = 1;
    sums_[arm] = reward;
    anchor_[arm] = 1;
    published_mean_[arm] = reward;
  }

  template <typename G>
  void observe(std::size_t arm, double reward, std::int64_t /*step*/, G& /*rng*/) {
    counts_[arm] += 1;
    sums_[arm] += reward;
    if (counts_[arm] >= 2 * anchor_[arm]) {
      anchor_[arm] = counts_[arm];
      published_mean_[arm] = sums_[arm] / static_cast<double>(counts_[arm]);
    }
  }

  double mean(std::size_t arm) const { return published_mean_[arm]; }
  double weight(std::size_t arm) const { return static_cast<double>(anchor_[arm]); }
  std::int64_t count(std::size_t arm) const { return counts_[arm]; }
  std::size_t num_arms() const { return counts_.size(); }

 private:
  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
  std::vector<std::int64_t> anchor_;
  std::vector<double> published_mean_;
};

}  // namespace dpbai

#endif  // DPBAI_ESTIMATORS_HPP_
