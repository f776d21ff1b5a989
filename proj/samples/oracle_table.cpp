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

// Characteristic times and privacy lower bounds of the six built-in
// instances across a few budgets.

#include <cstdio>

#include "dpbai/dpbai.hpp"

int main() {
  std::printf("%-5s %10s %10s %10s %8s %8s\n", "inst", "T_KL", "T_TV", "T_TV2", "sw_loc", "sw_glob");
  for (const auto& name : dpbai::named_instance_labels()) {
    const auto means = *dpbai::named_instance_means(name);
    if (!dpbai::BanditInstance::bernoulli(name, means).best_arm()) continue;
    const auto lb = dpbai::lower_bounds(means, 1.0);
    std::printf("%-5s %10.2f %10.2f %10.2f %8.4f %8.4f\n", name.c_str(), lb.t_kl, lb.t_tv, lb.t_tv2,
                lb.switch_local, lb.switch_global);
  }

  std::printf("\nlower bounds on mu1\n%8s %12s %12s\n", "eps", "lb_local", "lb_global");
  const auto mu1 = *dpbai::named_instance_means("mu1");
  for (double e : {0.01, 0.1, 0.5, 1.0, 5.0, 100.0}) {
    const auto lb = dpbai::lower_bounds(mu1, e);
    std::printf("%8g %12.1f %12.1f\n", e, lb.lb_local, lb.lb_global);
  }
  return 0;
}
