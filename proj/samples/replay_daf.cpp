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

// Feeds one arm's rewards through the doubling-and-forgetting estimator and
// prints every phase it publishes: window size, noiseless window mean,
// Laplace draw and the released value.

#include <cstdio>
#include <vector>

#include "dpbai/dpbai.hpp"

int main() {
  constexpr double kEps = 2.0;
  dpbai::DafEstimator est(1, kEps);
  std::vector<dpbai::PhaseEvent> log;
  est.set_phase_log(&log);

  dpbai::RngStream rewards(7, 0);
  dpbai::RngStream noise(7, 1);
  est.observe_initial(0, rewards.bernoulli(0.7) ? 1.0 : 0.0, 1, noise);
  for (std::int64_t t = 2; t <= 1024; ++t) est.observe(0, rewards.bernoulli(0.7) ? 1.0 : 0.0, t, noise);

  std::printf("%5s %8s %8s %10s %10s %10s\n", "phase", "count", "window", "mean", "laplace", "published");
  for (const auto& e : log) {
    std::printf("%5d %8lld %8lld %10.5f %10.5f %10.5f\n", e.phase, static_cast<long long>(e.count_at_switch),
                static_cast<long long>(e.local_count), e.phase_mean, e.laplace, e.published);
  }
  return 0;
}
