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

#ifndef DPBAI_SPECIAL_FUNCTIONS_HPP_
#define DPBAI_SPECIAL_FUNCTIONS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace dpbai {

namespace detail {

constexpr int kEtaTerms = 40;

// Borwein's d_k coefficients for the alternating zeta series, n = kEtaTerms.
inline const std::array<double, kEtaTerms + 1>& borwein_d() {
  static const std::array<double, kEtaTerms + 1> d = [] {
    std::array<double, kEtaTerms + 1> out{};
    const double n = kEtaTerms;
    double term = 1.0;  // n (n+i-1)! 4^i / ((n-i)! (2i)!) at i = 0
    double acc = 0.0;
    for (int i = 0; i <= kEtaTerms; ++i) {
      acc += term;
      out[i] = acc;
      term *= 4.0 * (n + i) * (n - i) / ((2.0 * i + 1.0) * (2.0 * i + 2.0));
    }
    return out;
  }();
  return d;
}

}  // namespace detail

/// Riemann zeta for real s > 1 through the Dirichlet eta function,
/// zeta(s) = eta(s) / (1 - 2^{1-s}). The denominator goes through expm1 so
/// arguments just above 1 keep their relative accuracy.
inline double zeta_real(double s) {
  if (!(s > 1.0)) throw std::invalid_argument("zeta_real needs s > 1");
  const auto& d = detail::borwein_d();
  const double dn = d[detail::kEtaTerms];
  double sum = 0.0;
  for (int k = 0; k < detail::kEtaTerms; ++k) {
    const double term = (d[k] - dn) * std::exp(-s * std::log(k + 1.0));
    sum += (k % 2 == 0) ? term : -term;
  }
  const double eta = -sum / dn;
  const double denom = -std::expm1((1.0 - s) * std::numbers::ln2);
  return eta / denom;
}

/// k(x) = log2(x) + 2, the only base-2 logarithm in the package.
inline double k_log2(double x) { return std::log2(x) + 2.0; }

/// g_G(lambda) = 2 lambda - 2 lambda ln(4 lambda) + ln zeta(2 lambda) - ln(1 - lambda) / 2.
inline double g_gaussian(double lambda) {
  return 2.0 * lambda - 2.0 * lambda * std::log(4.0 * lambda) + std::log(zeta_real(2.0 * lambda)) -
         0.5 * std::log1p(-lambda);
}

/// C_G(x) = min over lambda in (1/2, 1) of (g_G(lambda) + x) / lambda.
///
/// The objective blows up at both ends (zeta pole at 1/2, log barrier at 1)
/// and for large x the minimiser sits at 1 - lambda ~ 1/(2x), so the coarse
/// scan mixes a linear grid with a geometric one in 1 - lambda before the
/// golden-section refinement.
inline double c_gaussian(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("c_gaussian needs x > 0");
  constexpr double lo = 0.5 + 1e-6;
  constexpr double hi = 1.0 - 1e-12;
  auto f = [x](double lambda) { return (g_gaussian(lambda) + x) / lambda; };

  constexpr int kLinear = 200;
  constexpr int kGeometric = 120;
  std::array<double, kLinear + kGeometric + 2> pts{};
  int n = 0;
  for (int i = 0; i <= kLinear; ++i) pts[n++] = lo + (0.5 - 1e-6) * i / kLinear;
  for (int i = 1; i <= kGeometric; ++i) {
    // 1 - lambda from 0.5 down to 1e-12
    pts[n++] = 1.0 - 0.5 * std::pow(2e-12, static_cast<double>(i) / kGeometric);
  }
  pts[n++] = hi;
  std::sort(pts.begin(), pts.begin() + n);

  int best = 0;
  double fbest = f(pts[0]);
  for (int i = 1; i < n; ++i) {
    const double v = f(pts[i]);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  double a = pts[best > 0 ? best - 1 : 0];
  double b = pts[best + 1 < n ? best + 1 : n - 1];

  constexpr double invphi = 0.6180339887498948482;
  double c = b - invphi * (b - a);
  double e = a + invphi * (b - a);
  double fc = f(c);
  double fe = f(e);
  while (b - a > 1e-9) {
    if (fc < fe) {
      b = e;
      e = c;
      fe = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = e;
      fc = fe;
      e = a + invphi * (b - a);
      fe = f(e);
    }
  }
  return std::min({fbest, fc, fe, f(0.5 * (a + b))});
}

/// c_gaussian with a per-thread memo. Threshold evaluation hits a handful
/// of distinct arguments (DAF weights are powers of two) millions of times.
inline double c_gaussian_cached(double x) {
  thread_local std::unordered_map<double, double> memo;
  auto it = memo.find(x);
  if (it != memo.end()) return it->second;
  if (memo.size() > 4096) memo.clear();
  const double v = c_gaussian(x);
  memo.emplace(x, v);
  return v;
}

/// The z >= 1 with z - ln z = y, i.e. -W_{-1}(-e^{-y}).
///
/// f(z) = z - ln z - y is convex and increasing on [1, inf), and
/// [max(1, y), y + ln y + 1] always brackets the root, so Newton steps are
/// clamped into a shrinking bracket.
inline double wbar_minus1(double y) {
  if (!(y >= 1.0)) throw std::invalid_argument("wbar_minus1 needs y >= 1");
  if (y == 1.0) return 1.0;
  double lo = std::max(1.0, y);
  double hi = y + std::log(y) + 1.0;
  // near y = 1 the root is 1 + sqrt(2 (y - 1)) to leading order
  double z = y < 2.0 ? 1.0 + std::sqrt(2.0 * (y - 1.0)) : y + std::log(y);
  z = std::clamp(z, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const double fz = z - std::log(z) - y;
    if (fz > 0.0) {
      hi = z;
    } else {
      lo = z;
    }
    const double dz = 1.0 - 1.0 / z;
    double next = dz > 0.0 ? z - fz / dz : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - z) <= 1e-12 * z) return next;
    z = next;
  }
  return z;
}

}  // namespace dpbai

#endif  // DPBAI_SPECIAL_FUNCTIONS_HPP_
