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

#ifndef DPBAI_COMPLEXITY_ORACLE_HPP_
#define DPBAI_COMPLEXITY_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dpbai/privacy.hpp"

namespace dpbai {

// Characteristic times of the Gaussian / Bernoulli BAI games. Everything
// is expressed through the gaps Delta_a = mu_star - mu_a, with
// Delta_{a_star} = Delta_min.

struct Allocation {
  double T = 0.0;                 // characteristic time (inverse game value)
  std::vector<double> omega;      // point of the simplex attaining it
  double beta = 0.0;              // weight on the best arm
};

namespace detail {

inline std::size_t unique_best(const std::vector<double>& means) {
  if (means.size() < 2) throw std::invalid_argument("need at least two arms");
  std::size_t best = 0;
  for (std::size_t a = 1; a < means.size(); ++a) {
    if (means[a] > means[best]) best = a;
  }
  for (std::size_t a = 0; a < means.size(); ++a) {
    if (a != best && means[a] == means[best]) throw std::invalid_argument("best arm is not unique");
  }
  return best;
}

// Solves sum_{a != best} omega_a(c) = 1 - beta, where
// omega_a(c) = 1 / (num_a / c - 1/beta) and num_a is the per-arm cost
// numerator (Delta_a^2 / (2 sigma^2) or its eps-relaxed version).
inline Allocation equalise(const std::vector<double>& num, std::size_t best, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  double num_min = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < num.size(); ++a) {
    if (a != best) num_min = std::min(num_min, num[a]);
  }
  auto mass = [&](double c) {
    double s = 0.0;
    for (std::size_t a = 0; a < num.size(); ++a) {
      if (a != best) s += 1.0 / (num[a] / c - 1.0 / beta);
    }
    return s;
  };
  double lo = 0.0;
  double hi = beta * num_min;  // omega of the closest arm diverges here
  const double target = 1.0 - beta;
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    c = 0.5 * (lo + hi);
    const double m = mass(c);
    if (std::fabs(m - target) < 1e-13 || hi - lo <= 1e-16 * hi) break;
    if (m < target) {
      lo = c;
    } else {
      hi = c;
    }
  }
  Allocation out;
  out.T = 1.0 / c;
  out.beta = beta;
  out.omega.assign(num.size(), 0.0);
  out.omega[best] = beta;
  for (std::size_t a = 0; a < num.size(); ++a) {
    if (a != best) out.omega[a] = 1.0 / (num[a] / c - 1.0 / beta);
  }
  return out;
}

template <typename F>
double golden_min(F&& f, double a, double b, double tol, double* argmin) {
  constexpr double invphi = 0.6180339887498948482;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  if (argmin != nullptr) *argmin = x;
  return f(x);
}

inline std::vector<double> gaps(const std::vector<double>& means, std::size_t best) {
  std::vector<double> g(means.size());
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < means.size(); ++a) {
    if (a == best) continue;
    g[a] = means[best] - means[a];
    dmin = std::min(dmin, g[a]);
  }
  g[best] = dmin;
  return g;
}

}  // namespace detail

inline Allocation t_kl_beta(const std::vector<double>& means, double sigma, double beta) {
  const std::size_t best = detail::unique_best(means);
  const auto g = detail::gaps(means, best);
  std::vector<double> num(means.size());
  for (std::size_t a = 0; a < means.size(); ++a) num[a] = g[a] * g[a] / (2.0 * sigma * sigma);
  return detail::equalise(num, best, beta);
}

/// Relaxed characteristic time with numerator Delta_a min(eps/2, Delta_a), sigma = 1/2.
inline Allocation t_kl_beta_eps(const std::vector<double>& means, double beta, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const std::size_t best = detail::unique_best(means);
  const auto g = detail::gaps(means, best);
  std::vector<double> num(means.size());
  for (std::size_t a = 0; a < means.size(); ++a) num[a] = g[a] * std::min(0.5 * epsilon, g[a]) / 0.5;
  return detail::equalise(num, best, beta);
}

/// Gaussian T*_KL = min over beta of T*_{KL,beta}.
inline Allocation t_kl(const std::vector<double>& means, double sigma) {
  double beta_star = 0.5;
  detail::golden_min([&](double b) { return t_kl_beta(means, sigma, b).T; }, 1e-6, 1.0 - 1e-6, 1e-8,
                     &beta_star);
  return t_kl_beta(means, sigma, beta_star);
}

/// Largest |Delta_a^2 / (2 sigma^2 (1/beta + 1/omega_a)) - 1/T| over a != best.
inline double equilibrium_residual(const std::vector<double>& means, double sigma, const Allocation& al) {
  const std::size_t best = detail::unique_best(means);
  const auto g = detail::gaps(means, best);
  double worst = 0.0;
  for (std::size_t a = 0; a < means.size(); ++a) {
    if (a == best) continue;
    const double cost = g[a] * g[a] / (2.0 * sigma * sigma * (1.0 / al.beta + 1.0 / al.omega[a]));
    worst = std::max(worst, std::fabs(cost - 1.0 / al.T));
  }
  return worst;
}

inline double t_tv_bernoulli(const std::vector<double>& means) {
  const std::size_t best = detail::unique_best(means);
  const auto g = detail::gaps(means, best);
  double sum = 0.0;
  for (std::size_t a = 0; a < means.size(); ++a) sum += 1.0 / g[a];  // g[best] is Delta_min
  return sum;
}

/// H = 2 sigma^2 sum_a Delta_a^{-2}.
inline double complexity_h(const std::vector<double>& means, double sigma) {
  const std::size_t best = detail::unique_best(means);
  const auto g = detail::gaps(means, best);
  double sum = 0.0;
  for (double d : g) sum += 1.0 / (d * d);
  return 2.0 * sigma * sigma * sum;
}

// ---------------------------------------------------------------------------
// Brute-force sup-inf oracle (K <= 3)

enum class DivergenceKind { kKlBernoulli, kKlGaussian, kTv, kTv2, kMinKlCtv2, kMinSumKlEpsSumTv };

struct GameGrid {
  double simplex_step = 0.0;      // 0 means: 1e-3 for K = 2, 1e-2 for K = 3
  double alternative_step = 1e-3;
  double sigma = 1.0;             // kl_gaussian only
  double epsilon = 1.0;           // the two privacy-mixed kinds
};

inline double binary_kl(double p, double q) {
  auto term = [](double a, double b) {
    if (a <= 0.0) return 0.0;
    if (b <= 0.0) return std::numeric_limits<double>::infinity();
    return a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

namespace detail {

inline double per_arm_d(DivergenceKind kind, double mu, double x, const GameGrid& g, double c_eps) {
  switch (kind) {
    case DivergenceKind::kKlBernoulli: return binary_kl(mu, x);
    case DivergenceKind::kKlGaussian: return (mu - x) * (mu - x) / (2.0 * g.sigma * g.sigma);
    case DivergenceKind::kTv: return std::fabs(mu - x);
    case DivergenceKind::kTv2: return (mu - x) * (mu - x);
    case DivergenceKind::kMinKlCtv2: return std::min(binary_kl(mu, x), c_eps * (mu - x) * (mu - x));
    case DivergenceKind::kMinSumKlEpsSumTv: break;
  }
  return 0.0;
}

// inf over the alternative of sum_a omega_a d(mu_a, lambda_a). Only the best
// arm and one rival b move, to a shared value x in [mu_b, mu_best].
inline double inner_inf(DivergenceKind kind, const std::vector<double>& means, std::size_t best,
                        const std::vector<double>& omega, const GameGrid& g, double c_eps) {
  double out = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < means.size(); ++b) {
    if (b == best) continue;
    const double lo = means[b];
    const double hi = means[best];
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / g.alternative_step)));
    for (int i = 0; i <= n; ++i) {
      const double x = lo + (hi - lo) * i / n;
      double v;
      if (kind == DivergenceKind::kMinSumKlEpsSumTv) {
        const double kl = omega[best] * binary_kl(means[best], x) + omega[b] * binary_kl(means[b], x);
        const double tv = omega[best] * (hi - x) + omega[b] * (x - lo);
        v = std::min(kl, g.epsilon * tv);
      } else {
        v = omega[best] * per_arm_d(kind, means[best], x, g, c_eps) + omega[b] * per_arm_d(kind, means[b], x, g, c_eps);
      }
      out = std::min(out, v);
    }
  }
  return out;
}

}  // namespace detail

/// sup over a simplex grid of the inner inf. Test oracle only: refuses K > 3.
inline double brute_force_game(const std::vector<double>& means, DivergenceKind kind, GameGrid grid = {}) {
  const std::size_t K = means.size();
  if (K > 3) throw std::invalid_argument("brute_force_game is limited to K <= 3");
  const std::size_t best = detail::unique_best(means);
  if (grid.simplex_step <= 0.0) grid.simplex_step = K == 2 ? 1e-3 : 1e-2;
  const double c_eps = kind == DivergenceKind::kMinKlCtv2 ? c_local(grid.epsilon) : 0.0;
  const int n = static_cast<int>(std::lround(1.0 / grid.simplex_step));
  double best_val = 0.0;
  std::vector<double> omega(K);
  if (K == 2) {
    for (int i = 1; i < n; ++i) {
      omega[0] = static_cast<double>(i) / n;
      omega[1] = 1.0 - omega[0];
      best_val = std::max(best_val, detail::inner_inf(kind, means, best, omega, grid, c_eps));
    }
  } else {
    for (int i = 1; i < n; ++i) {
      for (int j = 1; i + j < n; ++j) {
        omega[0] = static_cast<double>(i) / n;
        omega[1] = static_cast<double>(j) / n;
        omega[2] = 1.0 - omega[0] - omega[1];
        best_val = std::max(best_val, detail::inner_inf(kind, means, best, omega, grid, c_eps));
      }
    }
  }
  return best_val;
}

// ---------------------------------------------------------------------------
// Lower bounds and regime switches

struct LowerBounds {
  double t_kl = 0.0;
  bool t_kl_is_gaussian_proxy = true;
  double t_tv = 0.0;
  double t_tv2 = 0.0;
  double lb_local = 0.0;
  double lb_global = 0.0;
  double switch_local = 0.0;   // eps solving c(eps) = T_TV2 / T_KL
  double switch_global = 0.0;  // T_TV / T_KL
};

/// eps with c(eps) = ratio, by bisection on [1e-6, 50]; clamps to the
/// bracket when the ratio falls outside c's range there.
inline double solve_c_local(double ratio) {
  double lo = 1e-6;
  double hi = 50.0;
  if (ratio <= c_local(lo)) return lo;
  if (ratio >= c_local(hi)) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (c_local(mid) < ratio) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Bernoulli T_KL: the grid oracle for K <= 3, otherwise the Gaussian
/// sigma = 1/2 value as a proxy (flagged).
inline LowerBounds lower_bounds(const std::vector<double>& means, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  LowerBounds lb;
  if (means.size() <= 3) {
    lb.t_kl = 1.0 / brute_force_game(means, DivergenceKind::kKlBernoulli);
    lb.t_kl_is_gaussian_proxy = false;
  } else {
    lb.t_kl = t_kl(means, 0.5).T;
  }
  lb.t_tv = t_tv_bernoulli(means);
  lb.t_tv2 = t_kl(means, 1.0).T / 2.0;
  lb.lb_global = std::max(lb.t_kl, lb.t_tv / epsilon);
  lb.lb_local = std::max(lb.t_kl, lb.t_tv2 / c_local(epsilon));
  lb.switch_global = lb.t_tv / lb.t_kl;
  lb.switch_local = solve_c_local(lb.t_tv2 / lb.t_kl);
  return lb;
}

struct ComplexityReport {
  std::string instance;
  std::vector<double> means;
  double epsilon = 0.0;
  double T_KL = 0.0;
  std::string T_KL_kind;
  double T_KL_beta = 0.0;
  double T_TV = 0.0;
  double T_TV2 = 0.0;
  double T_KL_beta_eps = 0.0;
  std::vector<double> omega_star;
  std::vector<double> omega_star_eps;
  double c_eps = 0.0;
  double lb_local = 0.0;
  double lb_global = 0.0;
  double switch_eps_local = 0.0;
  double switch_eps_global = 0.0;
  double H = 0.0;
};

inline ComplexityReport complexity_report(std::string instance, const std::vector<double>& means,
                                          double epsilon, double beta = 0.5) {
  ComplexityReport r;
  r.instance = std::move(instance);
  r.means = means;
  r.epsilon = epsilon;
  const LowerBounds lb = lower_bounds(means, epsilon);
  r.T_KL = lb.t_kl;
  r.T_KL_kind = lb.t_kl_is_gaussian_proxy ? "gaussian_proxy_sigma_0.5" : "bernoulli_grid";
  const Allocation half = t_kl_beta(means, 0.5, beta);
  r.T_KL_beta = half.T;
  r.T_TV = lb.t_tv;
  r.T_TV2 = lb.t_tv2;
  const Allocation relaxed = t_kl_beta_eps(means, beta, epsilon);
  r.T_KL_beta_eps = relaxed.T;
  r.omega_star = t_kl(means, 0.5).omega;
  r.omega_star_eps = relaxed.omega;
  r.c_eps = c_local(epsilon);
  r.lb_local = lb.lb_local;
  r.lb_global = lb.lb_global;
  r.switch_eps_local = lb.switch_local;
  r.switch_eps_global = lb.switch_global;
  r.H = complexity_h(means, 0.5);
  return r;
}

}  // namespace dpbai

#endif  // DPBAI_COMPLEXITY_ORACLE_HPP_
