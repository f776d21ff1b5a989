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

#ifndef DPBAI_CAMPAIGN_HPP_
#define DPBAI_CAMPAIGN_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dpbai/complexity_oracle.hpp"
#include "dpbai/config.hpp"
#include "dpbai/dpse.hpp"
#include "dpbai/regime.hpp"
#include "dpbai/rng.hpp"
#include "dpbai/top_two.hpp"

namespace dpbai {

class CampaignIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting. Shortest round-trip text keeps files byte-stable.

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

inline std::string format_eps(const std::optional<double>& eps) { return eps ? format_double(*eps) : "inf"; }

/// RFC 4180: quote when the field holds a comma, quote or line break.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Splits one CSV record. Records never span lines in our own output.
inline std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline constexpr std::string_view kRunsHeader = "algo,instance,eps,delta,seed,run_idx,tau,recommended,correct,censored,ms";
inline constexpr std::string_view kSummaryHeader = "algo,instance,eps,delta,runs,mean_tau,std_tau,error_rate,censored";

// ---------------------------------------------------------------------------
// Cells and tasks

struct Cell {
  std::size_t instance_idx;
  Algorithm algorithm;
  std::optional<double> epsilon;  // empty for non-private algorithms
  std::uint64_t seed;             // derived from the master seed and the cell key
};

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// The per-cell seed depends on the cell's identity only, so adding or
/// reordering cells never changes another cell's runs.
inline std::uint64_t cell_seed(std::uint64_t master, std::string_view instance, Algorithm a,
                               const std::optional<double>& eps) {
  std::string key(instance);
  key += '|';
  key += algorithm_name(a);
  key += '|';
  key += format_eps(eps);
  return mix64(master ^ fnv1a(key));
}

inline std::vector<Cell> expand_cells(const CampaignConfig& cfg) {
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < cfg.instances.size(); ++i) {
    for (Algorithm a : cfg.algorithms) {
      if (is_nonprivate(a)) {
        cells.push_back({i, a, std::nullopt, cell_seed(cfg.seed, cfg.instances[i].label(), a, std::nullopt)});
        continue;
      }
      for (double e : cfg.eps) cells.push_back({i, a, e, cell_seed(cfg.seed, cfg.instances[i].label(), a, e)});
    }
  }
  return cells;
}

inline AlgoConfig algo_config_for(const CampaignConfig& cfg, const Cell& cell) {
  AlgoConfig ac;
  ac.algorithm = cell.algorithm;
  ac.beta = cfg.beta;
  ac.delta = cfg.delta;
  ac.max_steps = cfg.max_steps;
  ac.threshold_mode = cfg.threshold_mode;
  if (cell.epsilon) ac.privacy.epsilon = *cell.epsilon;
  if (cell.algorithm == Algorithm::kGaussTt) ac.privacy.gamma = cfg.gamma;
  if (const auto* g = std::get_if<GaussianKnownVar>(&cfg.instances[cell.instance_idx].arms().front())) {
    ac.sigma = g->sigma;
  }
  return ac;
}

inline RunRecord run_cell_once(const CampaignConfig& cfg, const Cell& cell, std::uint64_t run_idx) {
  RngStream rng(cell.seed, run_idx);
  RunRecord rec = run_algorithm(algo_config_for(cfg, cell), cfg.instances[cell.instance_idx], rng);
  if (!cell.epsilon) rec.epsilon.reset();
  return rec;
}

inline std::string runs_row(const RunRecord& r, bool record_ms) {
  std::string s;
  s += csv_field(r.algorithm);
  s += ',';
  s += csv_field(r.instance);
  s += ',';
  s += format_eps(r.epsilon);
  s += ',';
  s += format_double(r.delta);
  s += ',';
  s += std::to_string(r.seed);
  s += ',';
  s += std::to_string(r.run_idx);
  s += ',';
  s += std::to_string(r.tau);
  s += ',';
  s += std::to_string(r.recommended + 1);
  s += ',';
  s += r.correct ? '1' : '0';
  s += ',';
  s += r.censored ? '1' : '0';
  s += ',';
  // wall time breaks byte-identical reruns, so it is opt-in
  s += record_ms ? format_double(std::round(r.ms * 1000.0) / 1000.0) : std::string("0");
  return s;
}

// ---------------------------------------------------------------------------
// Aggregation

struct RunRow {
  std::string algo, instance, eps, delta;
  std::int64_t tau = 0;
  bool correct = false;
  bool censored = false;
};

struct CellSummary {
  std::string algo, instance, eps, delta;
  std::int64_t runs = 0;
  double mean_tau = 0.0;
  double std_tau = 0.0;  // sample std (n - 1), 0 for a single run
  double error_rate = 0.0;
  std::int64_t censored = 0;
};

inline RunRow parse_runs_row(std::string_view line) {
  const auto f = csv_split(line);
  if (f.size() != 11) throw std::runtime_error("runs.csv: expected 11 fields, got " + std::to_string(f.size()));
  RunRow r;
  r.algo = f[0];
  r.instance = f[1];
  r.eps = f[2];
  r.delta = f[3];
  r.tau = std::stoll(f[6]);
  r.correct = f[8] == "1";
  r.censored = f[9] == "1";
  return r;
}

/// Groups rows by (algo, instance, eps, delta) in first-seen order and
/// accumulates in row order, so the same rows always give the same bytes.
inline std::vector<CellSummary> summarize(const std::vector<RunRow>& rows) {
  std::vector<CellSummary> out;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::int64_t>> taus;
  std::vector<std::int64_t> errors;
  for (const auto& r : rows) {
    const std::string key = r.algo + '\x1f' + r.instance + '\x1f' + r.eps + '\x1f' + r.delta;
    auto [it, fresh] = index.try_emplace(key, out.size());
    if (fresh) {
      out.push_back({r.algo, r.instance, r.eps, r.delta});
      taus.emplace_back();
      errors.push_back(0);
    }
    const std::size_t i = it->second;
    taus[i].push_back(r.tau);
    errors[i] += r.correct ? 0 : 1;
    out[i].censored += r.censored ? 1 : 0;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& v = taus[i];
    const double n = static_cast<double>(v.size());
    double sum = 0.0;
    for (auto t : v) sum += static_cast<double>(t);
    const double mean = sum / n;
    double ss = 0.0;
    for (auto t : v) ss += (static_cast<double>(t) - mean) * (static_cast<double>(t) - mean);
    out[i].runs = static_cast<std::int64_t>(v.size());
    out[i].mean_tau = mean;
    out[i].std_tau = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out[i].error_rate = static_cast<double>(errors[i]) / n;
  }
  return out;
}

inline std::string summary_csv(const std::vector<CellSummary>& cells) {
  std::string s(kSummaryHeader);
  s += '\n';
  for (const auto& c : cells) {
    s += csv_field(c.algo) + ',' + csv_field(c.instance) + ',' + c.eps + ',' + c.delta + ',' +
         std::to_string(c.runs) + ',' + format_double(c.mean_tau) + ',' + format_double(c.std_tau) + ',' +
         format_double(c.error_rate) + ',' + std::to_string(c.censored) + '\n';
  }
  return s;
}

inline std::vector<RunRow> read_runs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CampaignIoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kRunsHeader) throw std::runtime_error(path.string() + ": bad header");
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_runs_row(line));
  }
  return rows;
}

/// summary.csv text recomputed from a runs.csv on disk.
inline std::string recompute_summary(const std::filesystem::path& runs_csv) {
  return summary_csv(summarize(read_runs_csv(runs_csv)));
}

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::json to_json(const ComplexityReport& r) {
  nlohmann::json j;
  j["instance"] = r.instance;
  j["means"] = r.means;
  j["epsilon"] = r.epsilon;
  j["T_KL"] = r.T_KL;
  j["T_KL_kind"] = r.T_KL_kind;
  j["T_KL_beta"] = r.T_KL_beta;
  j["T_TV"] = r.T_TV;
  j["T_TV2"] = r.T_TV2;
  j["T_KL_beta_eps"] = r.T_KL_beta_eps;
  j["omega_star"] = r.omega_star;
  j["omega_star_eps"] = r.omega_star_eps;
  j["c_eps"] = r.c_eps;
  j["lb_local"] = r.lb_local;
  j["lb_global"] = r.lb_global;
  j["switch_eps_local"] = r.switch_eps_local;
  j["switch_eps_global"] = r.switch_eps_global;
  j["H"] = r.H;
  return j;
}

/// Knee power by family: local mechanisms pay 1/eps^2, global ones 1/eps.
inline double regime_power(Algorithm a) { return is_local_private(a) ? 2.0 : 1.0; }

inline nlohmann::json build_report(const CampaignConfig& cfg, const std::vector<CellSummary>& summary) {
  nlohmann::json j;
  j["master_seed"] = cfg.seed;
  j["delta"] = cfg.delta;
  j["max_steps"] = cfg.max_steps;
  j["threshold_mode"] = cfg.threshold_mode == ThresholdMode::kExact ? "exact" : "approx";
  j["eps_grid"] = cfg.eps;
  j["complexity"] = nlohmann::json::array();
  j["regimes"] = nlohmann::json::array();
  for (const auto& inst : cfg.instances) {
    // the oracle is for Bernoulli-type rewards with a unique best arm
    if (!inst.rewards_in_unit_interval() || !inst.best_arm()) continue;
    std::vector<double> grid = cfg.eps;
    if (grid.empty()) grid.push_back(1.0);
    std::optional<LowerBounds> cached;
    for (double e : grid) {
      const ComplexityReport rep = complexity_report(inst.label(), inst.means(), e, cfg.beta);
      j["complexity"].push_back(to_json(rep));
      if (!cached) cached = lower_bounds(inst.means(), e);
    }
    for (Algorithm a : cfg.algorithms) {
      if (is_nonprivate(a)) continue;
      std::vector<RegimePoint> pts;
      for (const auto& c : summary) {
        if (c.algo == algorithm_name(a) && c.instance == inst.label() && c.eps != "inf") {
          pts.push_back({std::stod(c.eps), c.mean_tau});
        }
      }
      nlohmann::json r;
      r["algo"] = algorithm_name(a);
      r["instance"] = inst.label();
      r["power"] = regime_power(a);
      const auto fit = regime_fit(pts, regime_power(a));
      r["knee_eps"] = fit ? nlohmann::json(fit->knee) : nlohmann::json(nullptr);
      r["switch_eps"] = is_local_private(a) ? cached->switch_local : cached->switch_global;
      j["regimes"].push_back(r);
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// Execution

/// Identifies the task list; a manifest only resumes a matching campaign.
inline std::string campaign_fingerprint(const CampaignConfig& cfg) {
  std::string key;
  for (const auto& inst : cfg.instances) {
    key += inst.label() + ':';
    for (double m : inst.means()) key += format_double(m) + ';';
  }
  for (Algorithm a : cfg.algorithms) key += std::string(algorithm_name(a)) + ',';
  for (double e : cfg.eps) key += format_double(e) + ',';
  key += format_double(cfg.delta) + '|' + std::to_string(cfg.runs) + '|' + std::to_string(cfg.seed) + '|' +
         std::to_string(cfg.max_steps) + '|' + format_double(cfg.gamma) + '|' + format_double(cfg.beta) + '|' +
         (cfg.threshold_mode == ThresholdMode::kExact ? "exact" : "approx") + '|' + (cfg.record_ms ? "ms" : "");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
  return buf;
}

struct CampaignResult {
  std::vector<CellSummary> summary;
  std::int64_t total_runs = 0;
  std::int64_t resumed_runs = 0;
  std::int64_t censored_runs = 0;
  double seconds = 0.0;
};

struct CampaignHooks {
  // called after each run lands in runs.csv, with (done, total)
  std::function<void(std::int64_t, std::int64_t)> progress;
  // test seam: returning false simulates a failed write
  std::function<bool(std::int64_t)> write_ok;
  // sees every fresh record (serialized, in completion order)
  std::function<void(const RunRecord&)> on_record;
};

namespace detail {

inline void write_manifest(const std::filesystem::path& dir, const std::string& fingerprint,
                           std::int64_t done, std::int64_t total, const std::string& status) {
  nlohmann::json m;
  m["fingerprint"] = fingerprint;
  m["completed_runs"] = done;
  m["total_runs"] = total;
  m["status"] = status;
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  out << m.dump(2) << '\n';
}

inline std::optional<std::int64_t> resumable_prefix(const std::filesystem::path& dir, const std::string& fingerprint) {
  std::ifstream in(dir / "manifest.json");
  if (!in) return std::nullopt;
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  if (m.value("fingerprint", "") != fingerprint) return std::nullopt;
  return m.value("completed_runs", std::int64_t{0});
}

}  // namespace detail

/// Runs every (cell, run) task on a pool. Results land in runs.csv in task
/// order regardless of which thread finished first; a manifest tracks the
/// written prefix so an interrupted campaign can pick up where it stopped.
inline CampaignResult run_campaign(const CampaignConfig& cfg, bool resume = false, CampaignHooks hooks = {}) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw CampaignIoError("cannot create output directory " + dir.string() + ": " + ec.message());

  const std::vector<Cell> cells = expand_cells(cfg);
  for (const auto& c : cells) {
    const BanditInstance& inst = cfg.instances[c.instance_idx];
    algo_config_for(cfg, c).validate(inst.num_arms());
    if (needs_unit_rewards(c.algorithm) && !inst.rewards_in_unit_interval()) {
      throw ConfigError(std::string(algorithm_name(c.algorithm)) + " needs rewards in [0, 1], instance '" +
                        inst.label() + "' is not bounded");
    }
  }
  const std::int64_t total = static_cast<std::int64_t>(cells.size()) * cfg.runs;
  const std::string fp = campaign_fingerprint(cfg);

  std::int64_t start = 0;
  std::vector<std::string> kept;  // rows carried over on resume
  if (resume) {
    if (auto done = detail::resumable_prefix(dir, fp)) {
      std::ifstream in(dir / "runs.csv");
      std::string line;
      if (in && std::getline(in, line) && line == kRunsHeader) {
        while (static_cast<std::int64_t>(kept.size()) < *done && std::getline(in, line)) kept.push_back(line);
      }
      start = static_cast<std::int64_t>(kept.size());
    }
  }

  std::ofstream runs_out(dir / "runs.csv", std::ios::trunc | std::ios::binary);
  if (!runs_out) throw CampaignIoError("cannot open " + (dir / "runs.csv").string());
  runs_out << kRunsHeader << '\n';
  for (const auto& l : kept) runs_out << l << '\n';
  runs_out.flush();

  std::vector<std::optional<std::string>> pending(static_cast<std::size_t>(total - start));
  std::mutex mu;
  std::int64_t written = start;
  std::atomic<std::int64_t> next{start};
  std::atomic<bool> failed{false};
  std::string failure;

  // the single appender: whoever holds the lock drains the ready prefix
  auto drain = [&] {
    while (written < total && pending[static_cast<std::size_t>(written - start)]) {
      auto& row = pending[static_cast<std::size_t>(written - start)];
      const bool ok = !hooks.write_ok || hooks.write_ok(written);
      if (ok) runs_out << *row << '\n';
      if (!ok || !runs_out) {
        failed = true;
        failure = "write to runs.csv failed at run " + std::to_string(written);
        return;
      }
      row.reset();
      ++written;
      if (hooks.progress) hooks.progress(written, total);
    }
  };

  auto worker = [&] {
    for (;;) {
      if (failed) return;
      const std::int64_t task = next.fetch_add(1);
      if (task >= total) return;
      const Cell& cell = cells[static_cast<std::size_t>(task / cfg.runs)];
      const auto run_idx = static_cast<std::uint64_t>(task % cfg.runs);
      std::string row;
      RunRecord rec;
      try {
        rec = run_cell_once(cfg, cell, run_idx);
        row = runs_row(rec, cfg.record_ms);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        failed = true;
        failure = e.what();
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      if (hooks.on_record) hooks.on_record(rec);
      pending[static_cast<std::size_t>(task - start)] = std::move(row);
      drain();
    }
  };

  const int width = std::max(1, std::min<int>(cfg.effective_threads(), static_cast<int>(std::max<std::int64_t>(1, total - start))));
  std::vector<std::thread> pool;
  for (int i = 0; i < width; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  runs_out.flush();

  if (failed) {
    detail::write_manifest(dir, fp, written, total, "partial");
    throw CampaignIoError(failure + " (" + std::to_string(written) + " of " + std::to_string(total) +
                          " runs kept; rerun with --resume)");
  }
  runs_out.close();

  CampaignResult res;
  res.summary = summarize(read_runs_csv(dir / "runs.csv"));
  for (const auto& c : res.summary) res.total_runs += c.runs;
  res.resumed_runs = start;
  // resumed rows count too
  for (const auto& c : res.summary) res.censored_runs += c.censored;
  {
    std::ofstream s(dir / "summary.csv", std::ios::trunc | std::ios::binary);
    s << summary_csv(res.summary);
    if (!s) throw CampaignIoError("cannot write summary.csv");
  }
  if (cfg.with_report) {
    std::ofstream r(dir / "report.json", std::ios::trunc);
    r << build_report(cfg, res.summary).dump(2) << '\n';
    if (!r) throw CampaignIoError("cannot write report.json");
  }
  detail::write_manifest(dir, fp, total, total, "complete");
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace dpbai

#endif  // DPBAI_CAMPAIGN_HPP_
