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

#ifndef DPBAI_PRIVACY_HPP_
#define DPBAI_PRIVACY_HPP_

#include <cmath>
#include <concepts>
#include <optional>
#include <stdexcept>

namespace dpbai {

/// Anything that hands out uniforms on (0, 1).
template <typename G>
concept UnitUniformSource = requires(G& g) {
  { g.uniform_open() } -> std::convertible_to<double>;
};

struct PrivacyBudget {
  double epsilon = 1.0;
  std::optional<double> gamma;  // approximate-DP parameter, Gaussian mechanism only

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("privacy budget epsilon must be > 0");
    if (gamma && !(*gamma > 0.0 && *gamma < 1.0)) {
      throw std::invalid_argument("privacy parameter gamma must lie in (0, 1)");
    }
  }
};

/// Lap(scale) by inverting the CDF of a single uniform: the half of (0, 1)
/// the uniform falls in picks the sign.
template <UnitUniformSource G>
double laplace_sample(double scale, G& rng) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace scale must be > 0");
  const double u = rng.uniform_open();
  if (u < 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

/// Success probability of randomized response on a reward r in [0, 1]:
/// (r (e^eps - 1) + 1) / (e^eps + 1), written in e^-eps to stay finite.
inline double rr_probability(double reward, double epsilon) {
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw std::invalid_argument("randomized response needs a reward in [0, 1]");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const double t = std::exp(-epsilon);
  return (reward * (1.0 - t) + t) / (1.0 + t);
}

/// Randomized response with e^-eps computed once, for per-step use.
class RandomizedResponse {
 public:
  explicit RandomizedResponse(double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    t_ = std::exp(-epsilon);
  }

  double probability(double reward) const {
    if (!(reward >= 0.0 && reward <= 1.0)) {
      throw std::invalid_argument("randomized response needs a reward in [0, 1]");
    }
    return (reward * (1.0 - t_) + t_) / (1.0 + t_);
  }

  template <UnitUniformSource G>
  int flip(double reward, G& rng) const {
    const double p = probability(reward);
    return rng.uniform_open() < p ? 1 : 0;
  }

 private:
  double t_ = 1.0;
};

template <UnitUniformSource G>
int rr_flip(double reward, double epsilon, G& rng) {
  const double p = rr_probability(reward, epsilon);
  return rng.uniform_open() < p ? 1 : 0;
}

/// min{4, e^{2 eps}} (e^eps - 1)^2, the local-privacy contraction factor.
inline double c_local(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const double em1 = std::expm1(epsilon);
  const double lead = 2.0 * epsilon < std::log(4.0) ? std::exp(2.0 * epsilon) : 4.0;
  return lead * em1 * em1;
}

/// Mean of the randomized-response output when the input is Bernoulli(mean).
inline double mu_epsilon(double mean, double epsilon) {
  if (!(mean >= 0.0 && mean <= 1.0)) throw std::invalid_argument("mean must lie in [0, 1]");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  return (2.0 * mean - 1.0) * std::tanh(0.5 * epsilon) / 2.0 + 0.5;
}

/// Noise level of the (eps, gamma) Gaussian mechanism on [0, 1] rewards.
inline double gaussian_mechanism_sigma(double epsilon, double gamma) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  return std::sqrt(2.0 * std::log(1.25 / gamma)) / epsilon;
}

}  // namespace dpbai

#endif  // DPBAI_PRIVACY_HPP_
