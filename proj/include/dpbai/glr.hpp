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

#ifndef DPBAI_GLR_HPP_
#define DPBAI_GLR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dpbai/special_functions.hpp"

namespace dpbai {

/// Thrown for option combinations that do not describe a valid algorithm.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class CostKind { kGauss, kGaussEps };
enum class ThresholdKind { kNonPrivate, kV1, kV2 };

// kApprox swaps C_G(x) for x + ln x and W_{-1}-bar(y) for y + ln y.
enum class ThresholdMode { kExact, kApprox };

inline void validate_pairing(CostKind cost, ThresholdKind threshold) {
  const bool ok = (cost == CostKind::kGauss && threshold == ThresholdKind::kNonPrivate) ||
                  (cost == CostKind::kGauss && threshold == ThresholdKind::kV1) ||
                  (cost == CostKind::kGaussEps && threshold == ThresholdKind::kV2);
  if (!ok) throw ConfigError("unsupported transportation cost / threshold pairing");
}

inline double w_gauss(double mu_a, double mu_b, double w_a, double w_b, double sigma) {
  const double gap = mu_a - mu_b;
  if (gap <= 0.0) return 0.0;
  return gap * gap / (2.0 * sigma * sigma * (1.0 / w_a + 1.0 / w_b));
}

inline double w_gauss_eps(double mu_a, double mu_b, double w_a, double w_b, double epsilon,
                          double sigma = 0.5) {
  const double gap = mu_a - mu_b;
  if (gap <= 0.0) return 0.0;
  return gap * std::min(0.5 * epsilon, gap) / (2.0 * sigma * sigma * (1.0 / w_a + 1.0 / w_b));
}

inline double transport_cost(CostKind kind, double mu_a, double mu_b, double w_a, double w_b,
                             double epsilon, double sigma) {
  return kind == CostKind::kGauss ? w_gauss(mu_a, mu_b, w_a, w_b, sigma)
                                  : w_gauss_eps(mu_a, mu_b, w_a, w_b, epsilon, sigma);
}

namespace detail {

inline double cg(double x, ThresholdMode mode) {
  return mode == ThresholdMode::kExact ? c_gaussian_cached(x) : x + std::log(x);
}

inline double wbar(double y, ThresholdMode mode) {
  return mode == ThresholdMode::kExact ? wbar_minus1(y) : y + std::log(y);
}

inline double log_log_term(double w) { return 2.0 * std::log(4.0 + std::log(w)); }

}  // namespace detail

/// The part of the non-private threshold that does not depend on weights.
inline double threshold_nonprivate_core(double delta, std::size_t num_arms,
                                        ThresholdMode mode = ThresholdMode::kExact) {
  return 2.0 * detail::cg(std::log((num_arms - 1.0) / delta) / 2.0, mode);
}

inline double threshold_nonprivate(double w_a, double w_b, double delta, std::size_t num_arms,
                                   ThresholdMode mode = ThresholdMode::kExact) {
  return threshold_nonprivate_core(delta, num_arms, mode) + detail::log_log_term(w_a) +
         detail::log_log_term(w_b);
}

inline double threshold_private_v1(double w_a, double w_b, double delta, double epsilon, double sigma,
                                   std::size_t num_arms, ThresholdMode mode = ThresholdMode::kExact) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double ka = k_log2(w_a);
  const double kb = k_log2(w_b);
  const double delta_split = delta * 18.0 / (pi2 * pi2 * ka * ka * kb * kb);
  const double base = 2.0 * threshold_nonprivate(w_a, w_b, delta_split, num_arms, mode);
  const double K = static_cast<double>(num_arms);
  const double la = std::log(pi2 * K * ka * ka / (3.0 * delta));
  const double lb = std::log(pi2 * K * kb * kb / (3.0 * delta));
  const double privacy = (la * la / w_a + lb * lb / w_b) / (epsilon * epsilon * sigma * sigma);
  return base + privacy;
}

inline double h_func(double w, double delta, std::size_t num_arms,
                     ThresholdMode mode = ThresholdMode::kExact) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double k = k_log2(w);
  const double inner = 2.0 * std::log(pi2 * num_arms * k * k / (2.0 * delta)) +
                       4.0 * std::log(4.0 + std::log(w)) + 0.5;
  if (!(inner >= 1.0)) throw std::domain_error("h_func: Lambert argument below 1");
  return detail::wbar(inner, mode) / 2.0;
}

/// Low-gap branch (gap below eps/2).
inline double threshold_private_v2_low(double w_a, double w_b, double delta, double epsilon,
                                       double sigma, std::size_t num_arms,
                                       ThresholdMode mode = ThresholdMode::kExact) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double K = static_cast<double>(num_arms);
  double cross = 0.0;
  for (double w : {w_a, w_b}) {
    const double k = k_log2(w);
    cross += std::sqrt(h_func(w, delta, num_arms, mode) / w) * std::log(pi2 * K * k * k / (2.0 * delta));
  }
  return 0.5 * threshold_private_v1(w_a, w_b, 2.0 * delta / 3.0, epsilon, sigma, num_arms, mode) +
         std::numbers::sqrt2 / (epsilon * sigma) * cross;
}

inline double threshold_private_v2_high(double w_a, double w_b, double delta, double epsilon,
                                        double sigma, std::size_t num_arms,
                                        ThresholdMode mode = ThresholdMode::kExact) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double kmax = std::max(k_log2(w_a), k_log2(w_b));
  const double lead = std::log(pi2 * num_arms * kmax / (2.0 * delta)) / (2.0 * sigma * sigma);
  const double sum = std::sqrt(w_a * h_func(w_a, delta, num_arms, mode)) +
                     std::sqrt(w_b * h_func(w_b, delta, num_arms, mode));
  return lead + epsilon / (2.0 * std::numbers::sqrt2 * sigma) * sum;
}

/// Mean-aware threshold: which branch applies depends on the published gap.
inline double threshold_private_v2(double mu_a, double mu_b, double w_a, double w_b, double delta,
                                   double epsilon, double sigma, std::size_t num_arms,
                                   ThresholdMode mode = ThresholdMode::kExact) {
  const double gap = std::max(0.0, mu_a - mu_b);
  if (gap < 0.5 * epsilon) {
    return threshold_private_v2_low(w_a, w_b, delta, epsilon, sigma, num_arms, mode);
  }
  return threshold_private_v2_high(w_a, w_b, delta, epsilon, sigma, num_arms, mode);
}

inline double threshold_value(ThresholdKind kind, double mu_a, double mu_b, double w_a, double w_b,
                              double delta, double epsilon, double sigma, std::size_t num_arms,
                              ThresholdMode mode = ThresholdMode::kExact) {
  switch (kind) {
    case ThresholdKind::kNonPrivate: return threshold_nonprivate(w_a, w_b, delta, num_arms, mode);
    case ThresholdKind::kV1:
      return threshold_private_v1(w_a, w_b, delta, epsilon, sigma, num_arms, mode);
    case ThresholdKind::kV2:
      return threshold_private_v2(mu_a, mu_b, w_a, w_b, delta, epsilon, sigma, num_arms, mode);
  }
  return 0.0;
}

struct GlrContext {
  std::vector<double> means;
  std::vector<double> weights;
  double delta = 0.01;
  std::optional<double> epsilon;
  double sigma = 0.5;

  std::size_t num_arms() const { return means.size(); }

  void validate() const {
    if (means.size() < 2 || weights.size() != means.size()) {
      throw std::invalid_argument("GLR context needs K >= 2 means and matching weights");
    }
    for (double w : weights) {
      if (!(w >= 1.0)) throw std::invalid_argument("GLR weights must be >= 1");
    }
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  }
};

struct StopVerdict {
  bool stop = false;
  std::size_t recommended = 0;
  std::vector<double> margins;  // W - c against each rival, in arm order
};

inline std::size_t argmax_lowest(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

inline StopVerdict glr_verdict(const GlrContext& ctx, CostKind cost, ThresholdKind threshold,
                               ThresholdMode mode = ThresholdMode::kExact) {
  validate_pairing(cost, threshold);
  ctx.validate();
  const bool needs_eps = cost == CostKind::kGaussEps || threshold != ThresholdKind::kNonPrivate;
  if (needs_eps && !ctx.epsilon) throw ConfigError("private stopping rule needs epsilon");
  const double eps = ctx.epsilon.value_or(0.0);
  StopVerdict out;
  out.recommended = argmax_lowest(ctx.means);
  const std::size_t a = out.recommended;
  double min_margin = INFINITY;
  for (std::size_t b = 0; b < ctx.num_arms(); ++b) {
    if (b == a) continue;
    const double w = transport_cost(cost, ctx.means[a], ctx.means[b], ctx.weights[a], ctx.weights[b],
                                    eps, ctx.sigma);
    const double c = threshold_value(threshold, ctx.means[a], ctx.means[b], ctx.weights[a],
                                     ctx.weights[b], ctx.delta, eps, ctx.sigma, ctx.num_arms(), mode);
    out.margins.push_back(w - c);
    min_margin = std::min(min_margin, w - c);
  }
  out.stop = min_margin >= 0.0;
  return out;
}

}  // namespace dpbai

#endif  // DPBAI_GLR_HPP_
