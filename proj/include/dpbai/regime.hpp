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

#ifndef DPBAI_REGIME_HPP_
#define DPBAI_REGIME_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace dpbai {

struct RegimePoint {
  double epsilon;
  double mean_tau;
};

struct RegimeFit {
  double knee;      // breakpoint epsilon
  double log_c;     // plateau level, ln tau for eps >= knee
  double sse;       // residual sum of squares in log space
};

/// Fits ln tau = ln C + p * max(0, ln knee - ln eps) by scanning the knee
/// over a log grid spanning the data and solving ln C in closed form.
/// p = 2 for local mechanisms, 1 for global ones.
inline std::optional<RegimeFit> regime_fit(std::vector<RegimePoint> pts, double power) {
  pts.erase(std::remove_if(pts.begin(), pts.end(),
                           [](const RegimePoint& p) { return !(p.epsilon > 0.0 && p.mean_tau > 0.0); }),
            pts.end());
  if (pts.size() < 4) return std::nullopt;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : pts) {
    lo = std::min(lo, std::log(p.epsilon));
    hi = std::max(hi, std::log(p.epsilon));
  }
  if (!(hi > lo)) return std::nullopt;

  constexpr int kGrid = 4000;
  RegimeFit best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i <= kGrid; ++i) {
    const double lk = lo + (hi - lo) * i / kGrid;
    double sum = 0.0;
    for (const auto& p : pts) sum += std::log(p.mean_tau) - power * std::max(0.0, lk - std::log(p.epsilon));
    const double log_c = sum / static_cast<double>(pts.size());
    double sse = 0.0;
    for (const auto& p : pts) {
      const double r = std::log(p.mean_tau) - log_c - power * std::max(0.0, lk - std::log(p.epsilon));
      sse += r * r;
    }
    if (sse < best.sse) best = {std::exp(lk), log_c, sse};
  }
  return best;
}

inline std::optional<double> regime_split(const std::vector<RegimePoint>& pts, double power) {
  auto fit = regime_fit(pts, power);
  if (!fit) return std::nullopt;
  return fit->knee;
}

}  // namespace dpbai

#endif  // DPBAI_REGIME_HPP_
