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

// Runs a handful of private and non-private identifications on mu1 and
// prints stopping time and recommendation for each.
//
//   sample_quickstart [epsilon] [runs]

#include <cstdio>
#include <cstdlib>

#include "dpbai/dpbai.hpp"

int main(int argc, char** argv) {
  const double eps = argc > 1 ? std::atof(argv[1]) : 1.0;
  const int runs = argc > 2 ? std::atoi(argv[2]) : 5;
  const dpbai::BanditInstance inst = dpbai::resolve_instance("mu1");

  for (dpbai::Algorithm a : {dpbai::Algorithm::kTtucb, dpbai::Algorithm::kCtbTt, dpbai::Algorithm::kAdapTt,
                             dpbai::Algorithm::kAdapTtStar, dpbai::Algorithm::kDpse}) {
    dpbai::AlgoConfig cfg;
    cfg.algorithm = a;
    cfg.delta = 0.1;
    cfg.privacy.epsilon = eps;
    double total = 0.0;
    int correct = 0;
    for (int r = 0; r < runs; ++r) {
      dpbai::RngStream rng(42, static_cast<std::uint64_t>(r));  // run r always sees the same stream
      const dpbai::RunRecord rec = dpbai::run_algorithm(cfg, inst, rng);
      total += static_cast<double>(rec.tau);
      correct += rec.correct ? 1 : 0;
    }
    std::printf("%-13s eps=%-6g mean tau %12.1f   correct %d/%d\n",
                std::string(dpbai::algorithm_name(a)).c_str(), eps, total / runs, correct, runs);
  }
  return 0;
}
