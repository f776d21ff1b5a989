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

#ifndef DPBAI_BANDIT_HPP_
#define DPBAI_BANDIT_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "dpbai/rng.hpp"

namespace dpbai {

struct Bernoulli {
  double mean;
};

struct GaussianKnownVar {
  double mean;
  double sigma;
};

enum class BoundedShape { kBernoulli, kScaledBeta };

// A [0,1] reward with a given mean. kScaledBeta draws Beta(m*kappa, (1-m)*kappa).
struct BoundedUnit {
  double mean;
  BoundedShape shape = BoundedShape::kBernoulli;
  double concentration = 4.0;
};

using ArmSpec = std::variant<Bernoulli, GaussianKnownVar, BoundedUnit>;

inline double arm_mean(const ArmSpec& arm) {
  return std::visit([](const auto& a) { return a.mean; }, arm);
}

inline bool arm_in_unit_interval(const ArmSpec& arm) {
  return !std::holds_alternative<GaussianKnownVar>(arm);
}

class BanditInstance {
 public:
  BanditInstance(std::string label, std::vector<ArmSpec> arms)
      : label_(std::move(label)), arms_(std::move(arms)) {
    if (arms_.size() < 2) throw std::invalid_argument("a bandit instance needs at least 2 arms");
    for (const auto& arm : arms_) validate(arm);
    means_.reserve(arms_.size());
    for (const auto& arm : arms_) means_.push_back(arm_mean(arm));
  }

  static BanditInstance bernoulli(std::string label, const std::vector<double>& means) {
    std::vector<ArmSpec> arms;
    arms.reserve(means.size());
    for (double m : means) arms.emplace_back(Bernoulli{m});
    return BanditInstance(std::move(label), std::move(arms));
  }

  static BanditInstance gaussian(std::string label, const std::vector<double>& means, double sigma) {
    std::vector<ArmSpec> arms;
    arms.reserve(means.size());
    for (double m : means) arms.emplace_back(GaussianKnownVar{m, sigma});
    return BanditInstance(std::move(label), std::move(arms));
  }

  std::size_t num_arms() const noexcept { return arms_.size(); }
  const std::string& label() const noexcept { return label_; }
  const std::vector<ArmSpec>& arms() const noexcept { return arms_; }
  const std::vector<double>& means() const noexcept { return means_; }

  bool rewards_in_unit_interval() const {
    for (const auto& arm : arms_) {
      if (!arm_in_unit_interval(arm)) return false;
    }
    return true;
  }

  /// Index of the strict maximum, or nullopt when the top mean is shared.
  std::optional<std::size_t> best_arm() const {
    std::size_t best = 0;
    for (std::size_t a = 1; a < means_.size(); ++a) {
      if (means_[a] > means_[best]) best = a;
    }
    for (std::size_t a = 0; a < means_.size(); ++a) {
      if (a != best && means_[a] == means_[best]) return std::nullopt;
    }
    return best;
  }

  std::size_t require_best_arm() const {
    auto best = best_arm();
    if (!best) throw std::invalid_argument("instance '" + label_ + "' has no unique best arm");
    return *best;
  }

  double sample_reward(std::size_t arm, RngStream& rng) const {
    if (arm >= arms_.size()) throw std::out_of_range("arm index out of range");
    return std::visit(
        [&rng](const auto& a) -> double {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, Bernoulli>) {
            return rng.uniform_open() < a.mean ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<T, GaussianKnownVar>) {
            return a.mean + a.sigma * rng.normal();
          } else {
            if (a.shape == BoundedShape::kBernoulli) return rng.uniform_open() < a.mean ? 1.0 : 0.0;
            return rng.beta(a.mean * a.concentration, (1.0 - a.mean) * a.concentration);
          }
        },
        arms_[arm]);
  }

 private:
  static void validate(const ArmSpec& arm) {
    std::visit(
        [](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, Bernoulli>) {
            // closed interval: the linear instance has arms at exactly 0 and 1
            if (!(a.mean >= 0.0 && a.mean <= 1.0)) {
              throw std::invalid_argument("Bernoulli mean must lie in [0, 1]");
            }
          } else if constexpr (std::is_same_v<T, GaussianKnownVar>) {
            if (!std::isfinite(a.mean)) throw std::invalid_argument("Gaussian mean must be finite");
            if (!(a.sigma > 0.0)) throw std::invalid_argument("Gaussian sigma must be > 0");
          } else {
            if (!(a.mean > 0.0 && a.mean < 1.0)) {
              throw std::invalid_argument("bounded-unit mean must lie in (0, 1)");
            }
            if (!(a.concentration > 0.0)) {
              throw std::invalid_argument("bounded-unit concentration must be > 0");
            }
          }
        },
        arm);
  }

  std::string label_;
  std::vector<ArmSpec> arms_;
  std::vector<double> means_;
};

// The six benchmark instances used throughout the experiments.
inline std::optional<std::vector<double>> named_instance_means(std::string_view name) {
  if (name == "mu1") return std::vector<double>{0.95, 0.9, 0.9, 0.9, 0.5};
  if (name == "mu2") return std::vector<double>{0.75, 0.7, 0.7, 0.7, 0.7};
  if (name == "mu3") return std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0};
  if (name == "mu4") return std::vector<double>{0.75, 0.625, 0.5, 0.375, 0.25};
  if (name == "mu5") return std::vector<double>{0.75, 0.53125, 0.375, 0.28125, 0.25};
  if (name == "mu6") return std::vector<double>{0.75, 0.71875, 0.625, 0.46875, 0.25};
  return std::nullopt;
}

inline std::vector<std::string> named_instance_labels() {
  return {"mu1", "mu2", "mu3", "mu4", "mu5", "mu6"};
}

/// "0.9,0.5,0.1" -> {0.9, 0.5, 0.1}; nullopt on any malformed token.
inline std::optional<std::vector<double>> parse_mean_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view tok = text.substr(pos, comma - pos);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (tok.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

/// Resolves a built-in name or an inline comma-separated list of Bernoulli means.
inline BanditInstance resolve_instance(std::string_view spec) {
  if (auto means = named_instance_means(spec)) return BanditInstance::bernoulli(std::string(spec), *means);
  if (spec.find(',') != std::string_view::npos) {
    if (auto means = parse_mean_list(spec)) return BanditInstance::bernoulli(std::string(spec), *means);
  }
  throw std::invalid_argument("unknown instance '" + std::string(spec) + "'");
}

}  // namespace dpbai

#endif  // DPBAI_BANDIT_HPP_
