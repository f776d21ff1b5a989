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

// dpbai: run campaigns, query the complexity oracle, time the hot loop and
// run the invariant suites.
//
// Exit codes: 0 ok, 1 a run or suite failed, 2 usage error.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpbai/dpbai.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct CommonFlags {
  std::string config;
  std::vector<std::string> instances;
  std::vector<std::string> algos;
  std::vector<std::string> eps;
  std::optional<double> delta;
  std::optional<std::int64_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> max_steps;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<double> gamma;
  bool threshold_approx = false;
  bool record_ms = false;
  bool resume = false;
  bool quiet = false;
};

std::vector<double> parse_eps_list(const std::vector<std::string>& toks) {
  std::vector<double> out;
  for (const auto& t : toks) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec == std::errc() && ptr == t.data() + t.size()) {
      out.push_back(v);
    } else {
      for (double e : dpbai::eps_preset(t)) out.push_back(e);
    }
  }
  return out;
}

dpbai::CampaignConfig build_campaign(const CommonFlags& f) {
  dpbai::CampaignConfig cfg;
  dpbai::ConfigDocument doc;
  doc.tables[""];
  if (!f.config.empty()) {
    cfg = dpbai::load_campaign(f.config);
    std::ifstream in(f.config);
    std::stringstream ss;
    ss << in.rdbuf();
    doc = dpbai::parse_config(ss.str());
  }
  if (!f.instances.empty()) {
    cfg.instances.clear();
    for (const auto& s : f.instances) cfg.instances.push_back(dpbai::instance_from(doc, s));
  }
  if (!f.algos.empty()) cfg.algorithms = dpbai::algorithms_from_names(f.algos);
  if (!f.eps.empty()) cfg.eps = parse_eps_list(f.eps);
  if (f.delta) cfg.delta = *f.delta;
  if (f.runs) cfg.runs = *f.runs;
  if (f.seed) cfg.seed = *f.seed;
  if (f.max_steps) cfg.max_steps = *f.max_steps;
  if (f.threads) cfg.threads = *f.threads;
  if (f.out) cfg.out = *f.out;
  if (f.gamma) cfg.gamma = *f.gamma;
  if (f.threshold_approx) cfg.threshold_mode = dpbai::ThresholdMode::kApprox;
  if (f.record_ms) cfg.record_ms = true;
  cfg.validate();
  return cfg;
}

int cmd_run(const CommonFlags& f) {
  const dpbai::CampaignConfig cfg = build_campaign(f);
  dpbai::CampaignHooks hooks;
  if (!f.quiet) {
    hooks.progress = [last = std::int64_t{-1}](std::int64_t done, std::int64_t total) mutable {
      const std::int64_t pct = done * 100 / total;
      if (pct != last) {
        last = pct;
        std::fprintf(stderr, "\r%3lld%% (%lld/%lld runs)", static_cast<long long>(pct),
                     static_cast<long long>(done), static_cast<long long>(total));
        if (done == total) std::fputc('\n', stderr);
      }
    };
  }
  const dpbai::CampaignResult res = dpbai::run_campaign(cfg, f.resume, hooks);
  std::cout << std::left << std::setw(14) << "algo" << std::setw(12) << "instance" << std::setw(10) << "eps"
            << std::right << std::setw(14) << "mean_tau" << std::setw(14) << "std_tau" << std::setw(9) << "error"
            << std::setw(10) << "censored" << '\n';
  for (const auto& c : res.summary) {
    std::cout << std::left << std::setw(14) << c.algo << std::setw(12) << c.instance << std::setw(10) << c.eps
              << std::right << std::setw(14) << std::setprecision(6) << c.mean_tau << std::setw(14) << c.std_tau
              << std::setw(9) << c.error_rate << std::setw(10) << c.censored << '\n';
  }
  std::cout << res.total_runs << " runs (" << res.resumed_runs << " resumed), " << res.censored_runs
            << " censored, " << std::setprecision(3) << res.seconds << " s -> " << cfg.out << '\n';
  return kOk;
}

int cmd_oracle(const std::string& instance, double eps, double beta, const std::string& format) {
  const dpbai::BanditInstance inst = dpbai::resolve_instance(instance);
  if (!inst.rewards_in_unit_interval()) throw dpbai::ConfigError("the oracle needs Bernoulli means in [0, 1]");
  const auto rep = dpbai::complexity_report(inst.label(), inst.means(), eps, beta);
  if (format == "json" || format == "both") std::cout << dpbai::to_json(rep).dump(2) << '\n';
  if (format == "table" || format == "both") {
    auto row = [](const char* k, double v) {
      std::cout << "  " << std::left << std::setw(18) << k << std::right << std::setprecision(10) << v << '\n';
    };
    std::cout << "instance " << rep.instance << ", eps " << rep.epsilon << " (T_KL: " << rep.T_KL_kind << ")\n";
    row("T_KL", rep.T_KL);
    row("T_KL_beta", rep.T_KL_beta);
    row("T_TV", rep.T_TV);
    row("T_TV2", rep.T_TV2);
    row("T_KL_beta_eps", rep.T_KL_beta_eps);
    row("H", rep.H);
    row("c_eps", rep.c_eps);
    row("lb_local", rep.lb_local);
    row("lb_global", rep.lb_global);
    row("switch_eps_local", rep.switch_eps_local);
    row("switch_eps_global", rep.switch_eps_global);
    std::cout << "  omega_star        ";
    for (double w : rep.omega_star) std::cout << ' ' << std::setprecision(5) << w;
    std::cout << "\n  omega_star_eps    ";
    for (double w : rep.omega_star_eps) std::cout << ' ' << std::setprecision(5) << w;
    std::cout << '\n';
  }
  return kOk;
}

int cmd_bench(const CommonFlags& f, std::int64_t steps) {
  const dpbai::BanditInstance inst = dpbai::resolve_instance(f.instances.empty() ? "mu1" : f.instances.front());
  const auto algos = dpbai::algorithms_from_names(f.algos.empty() ? std::vector<std::string>{"ttucb"} : f.algos);
  const auto eps = f.eps.empty() ? std::vector<double>{1.0} : parse_eps_list(f.eps);
  for (dpbai::Algorithm a : algos) {
    dpbai::AlgoConfig cfg;
    cfg.algorithm = a;
    cfg.delta = f.delta.value_or(0.01);
    cfg.max_steps = steps;
    cfg.privacy.epsilon = eps.front();
    if (a == dpbai::Algorithm::kGaussTt) cfg.privacy.gamma = f.gamma.value_or(0.05);
    if (f.threshold_approx) cfg.threshold_mode = dpbai::ThresholdMode::kApprox;
    std::int64_t pulls = 0;
    int runs = 0;
    const auto t0 = std::chrono::steady_clock::now();
    double secs = 0.0;
    // repeat until a second of work or the pull budget is spent
    while (pulls < steps && secs < 1.0) {
      dpbai::RngStream rng(f.seed.value_or(1), static_cast<std::uint64_t>(runs));
      pulls += dpbai::run_algorithm(cfg, inst, rng).tau;
      ++runs;
      secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    std::cout << std::left << std::setw(14) << dpbai::algorithm_name(a) << std::right << std::setw(12) << pulls
              << " pulls in " << std::setw(3) << runs << " runs, " << std::setprecision(4)
              << 1e9 * secs / static_cast<double>(pulls) << " ns/pull\n";
  }
  return kOk;
}

int cmd_verify() {
  bool ok = true;
  for (const auto& r : dpbai::run_all_suites()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(26) << r.name << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? kOk : kFailed;
}

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "campaign config file")->check(CLI::ExistingFile);
  sub->add_option("--instance", f.instances, "instance name (mu1..mu6, or a config table) or comma-separated means")
      ->take_all();
  sub->add_option("--algo", f.algos, "algorithms, comma-separated")->delimiter(',');
  sub->add_option("--eps", f.eps, "epsilon values or presets, comma-separated")->delimiter(',');
  sub->add_option("--delta", f.delta, "risk level");
  sub->add_option("--runs", f.runs, "runs per cell");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--max-steps", f.max_steps, "per-run pull cap");
  sub->add_option("--threads", f.threads, "worker threads (0: all cores)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--gamma", f.gamma, "approximate-DP parameter for gauss_tt");
  sub->add_flag("--threshold-approx", f.threshold_approx, "use x + ln x style threshold approximations");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpbai: differentially private best-arm identification"};
  app.require_subcommand(1);
  CommonFlags run_flags;
  CommonFlags bench_flags;

  auto* run = app.add_subcommand("run", "run a campaign");
  add_common(run, run_flags);
  run->add_flag("--record-ms", run_flags.record_ms, "write per-run wall time (breaks byte-identical reruns)");
  run->add_flag("--resume", run_flags.resume, "continue a partial campaign in --out");
  run->add_flag("-q,--quiet", run_flags.quiet, "no progress line");

  std::string oracle_instance = "mu1";
  double oracle_eps = 1.0;
  double oracle_beta = 0.5;
  std::string oracle_format = "both";
  auto* oracle = app.add_subcommand("oracle", "complexity quantities for one instance");
  oracle->add_option("--instance", oracle_instance, "instance name or comma-separated means");
  oracle->add_option("--eps", oracle_eps, "privacy budget")->check(CLI::PositiveNumber);
  oracle->add_option("--beta", oracle_beta, "Top Two parameter")->check(CLI::Range(1e-6, 1.0 - 1e-6));
  oracle->add_option("--format", oracle_format, "json, table or both")->check(CLI::IsMember({"json", "table", "both"}));

  std::int64_t bench_steps = 2'000'000;
  auto* bench = app.add_subcommand("bench", "hot-loop throughput");
  add_common(bench, bench_flags);
  bench->add_option("--steps", bench_steps, "pull budget per algorithm");

  app.add_subcommand("verify", "run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (oracle->parsed()) return cmd_oracle(oracle_instance, oracle_eps, oracle_beta, oracle_format);
    if (bench->parsed()) return cmd_bench(bench_flags, bench_steps);
    return cmd_verify();
  } catch (const std::invalid_argument& e) {
    // ConfigError and unknown names
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
}
