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

#ifndef DPBAI_CONFIG_HPP_
#define DPBAI_CONFIG_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "dpbai/bandit.hpp"
#include "dpbai/glr.hpp"
#include "dpbai/top_two.hpp"

namespace dpbai {

// A small TOML-shaped format: `key = value` lines, `#` comments, `[table]`
// headers, values that are numbers, "strings", booleans or flat arrays of
// those. Dotted table names are kept verbatim ("instances.easy").

using ScalarValue = std::variant<double, std::string, bool>;

struct ConfigValue {
  std::variant<ScalarValue, std::vector<ScalarValue>> v;

  bool is_array() const { return std::holds_alternative<std::vector<ScalarValue>>(v); }
};

struct ConfigDocument {
  // table name ("" for the root) -> key -> value
  std::map<std::string, std::map<std::string, ConfigValue>> tables;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Drops a trailing comment, ignoring '#' inside quotes.
inline std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

inline ScalarValue parse_scalar(std::string_view tok, int line) {
  tok = trim(tok);
  if (tok.empty()) throw ConfigError("line " + std::to_string(line) + ": empty value");
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"') {
      throw ConfigError("line " + std::to_string(line) + ": unterminated string");
    }
    return std::string(tok.substr(1, tok.size() - 2));
  }
  if (tok == "true") return true;
  if (tok == "false") return false;
  std::string cleaned;
  for (char c : tok) {
    if (c != '_') cleaned.push_back(c);
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), v);
  if (ec != std::errc() || ptr != cleaned.data() + cleaned.size()) {
    throw ConfigError("line " + std::to_string(line) + ": cannot parse value '" + std::string(tok) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_array(std::string_view body) {
  std::vector<std::string_view> out;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '"') quoted = !quoted;
    if (body[i] == ',' && !quoted) {
      out.push_back(body.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(body.substr(start));
  return out;
}

}  // namespace detail

inline ConfigDocument parse_config(std::string_view text) {
  ConfigDocument doc;
  doc.tables[""];
  std::string table;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  std::string pending;  // multi-line arrays
  int pending_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = detail::trim(detail::strip_comment(raw));
    if (!pending.empty()) {
      pending.append(" ").append(s);
      if (s.find(']') == std::string_view::npos) continue;
      s = pending;
    } else if (s.empty()) {
      continue;
    }
    std::string owned(s);
    pending.clear();
    std::string_view cur = owned;
    if (cur.front() == '[' && cur.find('=') == std::string_view::npos) {
      if (cur.back() != ']') throw ConfigError("line " + std::to_string(line) + ": bad table header");
      table = std::string(detail::trim(cur.substr(1, cur.size() - 2)));
      if (table.empty()) throw ConfigError("line " + std::to_string(line) + ": empty table name");
      doc.tables[table];
      continue;
    }
    const std::size_t eq = cur.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
    const std::string key(detail::trim(cur.substr(0, eq)));
    std::string_view val = detail::trim(cur.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
    if (!val.empty() && val.front() == '[' && val.find(']') == std::string_view::npos) {
      pending = owned;
      pending_line = line;
      continue;
    }
    const int at = pending_line ? pending_line : line;
    pending_line = 0;
    ConfigValue cv;
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']') throw ConfigError("line " + std::to_string(at) + ": bad array");
      std::vector<ScalarValue> arr;
      std::string_view body = detail::trim(val.substr(1, val.size() - 2));
      if (!body.empty()) {
        for (auto tok : detail::split_array(body)) {
          if (detail::trim(tok).empty()) continue;  // trailing comma
          arr.push_back(detail::parse_scalar(tok, at));
        }
      }
      cv.v = std::move(arr);
    } else {
      cv.v = detail::parse_scalar(val, at);
    }
    if (doc.tables[table].count(key)) throw ConfigError("line " + std::to_string(at) + ": duplicate key '" + key + "'");
    doc.tables[table][key] = std::move(cv);
  }
  if (!pending.empty()) throw ConfigError("unterminated array starting at line " + std::to_string(pending_line));
  return doc;
}

// ---------------------------------------------------------------------------

/// Privacy grids used by the experiments. The global grid's 0.001 point is
/// slow enough that the default preset leaves it out.
inline std::vector<double> eps_preset(std::string_view name) {
  if (name == "grid-global")
    return {0.005, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1, 10, 100, 1000};
  if (name == "grid-global-full")
    return {0.001, 0.005, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1, 10, 100, 1000};
  if (name == "grid-local") return {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1, 10, 100};
  throw ConfigError("unknown epsilon preset '" + std::string(name) + "'");
}

struct CampaignConfig {
  std::vector<BanditInstance> instances;
  std::vector<Algorithm> algorithms;
  std::vector<double> eps;
  double delta = 0.01;
  std::int64_t runs = 200;
  std::uint64_t seed = 1;
  std::int64_t max_steps = 10'000'000;
  int threads = 0;  // 0: hardware concurrency
  std::string out = "out";
  ThresholdMode threshold_mode = ThresholdMode::kExact;
  double gamma = 0.05;
  double beta = 0.5;
  bool record_ms = false;
  bool with_report = true;

  int effective_threads() const {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }

  void validate() const {
    if (instances.empty()) throw ConfigError("campaign has no instances");
    if (algorithms.empty()) throw ConfigError("campaign has no algorithms");
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    bool any_private = false;
    for (Algorithm a : algorithms) any_private = any_private || !is_nonprivate(a);
    if (any_private && eps.empty()) throw ConfigError("private algorithms need an epsilon grid");
    for (double e : eps) {
      if (!(e > 0.0)) throw ConfigError("epsilon grid must be strictly positive");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
    for (const auto& inst : instances) {
      if (max_steps < static_cast<std::int64_t>(inst.num_arms()) + 1) throw ConfigError("max_steps must be >= K + 1");
    }
  }
};

namespace detail {

inline const ScalarValue& scalar_of(const ConfigValue& cv, const std::string& key) {
  if (cv.is_array()) throw ConfigError("key '" + key + "' must be a scalar");
  return std::get<ScalarValue>(cv.v);
}

inline double number_of(const ConfigValue& cv, const std::string& key) {
  const auto& s = scalar_of(cv, key);
  if (!std::holds_alternative<double>(s)) throw ConfigError("key '" + key + "' must be a number");
  return std::get<double>(s);
}

inline std::string string_of(const ConfigValue& cv, const std::string& key) {
  const auto& s = scalar_of(cv, key);
  if (!std::holds_alternative<std::string>(s)) throw ConfigError("key '" + key + "' must be a string");
  return std::get<std::string>(s);
}

inline std::vector<ScalarValue> list_of(const ConfigValue& cv) {
  if (cv.is_array()) return std::get<std::vector<ScalarValue>>(cv.v);
  return {std::get<ScalarValue>(cv.v)};
}

inline std::int64_t integer_of(const ConfigValue& cv, const std::string& key) {
  const double d = number_of(cv, key);
  if (d != std::floor(d)) throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<std::int64_t>(d);
}

}  // namespace detail

/// Looks up a name among [instances.NAME] tables first, then built-ins,
/// then inline mean lists.
inline BanditInstance instance_from(const ConfigDocument& doc, const std::string& name) {
  auto it = doc.tables.find("instances." + name);
  if (it == doc.tables.end()) return resolve_instance(name);
  const auto& t = it->second;
  auto mit = t.find("means");
  if (mit == t.end()) throw ConfigError("instance '" + name + "' has no means");
  std::vector<double> means;
  for (const auto& v : detail::list_of(mit->second)) {
    if (!std::holds_alternative<double>(v)) throw ConfigError("instance '" + name + "': means must be numbers");
    means.push_back(std::get<double>(v));
  }
  std::string family = "bernoulli";
  if (auto f = t.find("family"); f != t.end()) family = detail::string_of(f->second, "family");
  if (family == "bernoulli") return BanditInstance::bernoulli(name, means);
  if (family == "gaussian") {
    double sigma = 0.5;
    if (auto s = t.find("sigma"); s != t.end()) sigma = detail::number_of(s->second, "sigma");
    return BanditInstance::gaussian(name, means, sigma);
  }
  if (family == "beta") {
    double kappa = 4.0;
    if (auto s = t.find("concentration"); s != t.end()) kappa = detail::number_of(s->second, "concentration");
    std::vector<ArmSpec> arms;
    for (double m : means) arms.emplace_back(BoundedUnit{m, BoundedShape::kScaledBeta, kappa});
    return BanditInstance(name, std::move(arms));
  }
  throw ConfigError("instance '" + name + "': unknown family '" + family + "'");
}

inline std::vector<double> eps_from(const ConfigValue& cv) {
  std::vector<double> out;
  for (const auto& v : detail::list_of(cv)) {
    if (std::holds_alternative<std::string>(v)) {
      for (double e : eps_preset(std::get<std::string>(v))) out.push_back(e);
    } else if (std::holds_alternative<double>(v)) {
      out.push_back(std::get<double>(v));
    } else {
      throw ConfigError("eps entries must be numbers or preset names");
    }
  }
  return out;
}

inline std::vector<Algorithm> algorithms_from_names(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& n : names) {
    auto a = parse_algorithm(n);
    if (!a) throw ConfigError("unknown algorithm '" + n + "'");
    out.push_back(*a);
  }
  return out;
}

inline CampaignConfig campaign_from_document(const ConfigDocument& doc) {
  CampaignConfig cfg;
  const auto& root = doc.tables.at("");
  static const char* const kKnown[] = {"instances", "algorithms", "eps", "delta", "runs", "seed",
                                       "max_steps", "threads", "out", "threshold_mode", "gamma",
                                       "beta", "record_ms", "report"};
  for (const auto& [key, _] : root) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw ConfigError("unknown key '" + key + "'");
  }
  if (auto it = root.find("instances"); it != root.end()) {
    for (const auto& v : detail::list_of(it->second)) {
      if (!std::holds_alternative<std::string>(v)) throw ConfigError("instances must be names");
      cfg.instances.push_back(instance_from(doc, std::get<std::string>(v)));
    }
  }
  if (auto it = root.find("algorithms"); it != root.end()) {
    std::vector<std::string> names;
    for (const auto& v : detail::list_of(it->second)) {
      if (!std::holds_alternative<std::string>(v)) throw ConfigError("algorithms must be names");
      names.push_back(std::get<std::string>(v));
    }
    cfg.algorithms = algorithms_from_names(names);
  }
  if (auto it = root.find("eps"); it != root.end()) cfg.eps = eps_from(it->second);
  if (auto it = root.find("delta"); it != root.end()) cfg.delta = detail::number_of(it->second, "delta");
  if (auto it = root.find("runs"); it != root.end()) cfg.runs = detail::integer_of(it->second, "runs");
  if (auto it = root.find("seed"); it != root.end()) {
    cfg.seed = static_cast<std::uint64_t>(detail::integer_of(it->second, "seed"));
  }
  if (auto it = root.find("max_steps"); it != root.end()) cfg.max_steps = detail::integer_of(it->second, "max_steps");
  if (auto it = root.find("threads"); it != root.end()) {
    cfg.threads = static_cast<int>(detail::integer_of(it->second, "threads"));
  }
  if (auto it = root.find("out"); it != root.end()) cfg.out = detail::string_of(it->second, "out");
  if (auto it = root.find("threshold_mode"); it != root.end()) {
    const std::string m = detail::string_of(it->second, "threshold_mode");
    if (m == "exact") {
      cfg.threshold_mode = ThresholdMode::kExact;
    } else if (m == "approx") {
      cfg.threshold_mode = ThresholdMode::kApprox;
    } else {
      throw ConfigError("threshold_mode must be \"exact\" or \"approx\"");
    }
  }
  if (auto it = root.find("gamma"); it != root.end()) cfg.gamma = detail::number_of(it->second, "gamma");
  if (auto it = root.find("beta"); it != root.end()) cfg.beta = detail::number_of(it->second, "beta");
  auto bool_of = [](const ConfigValue& cv, const std::string& key) {
    const auto& s = detail::scalar_of(cv, key);
    if (!std::holds_alternative<bool>(s)) throw ConfigError("key '" + key + "' must be true or false");
    return std::get<bool>(s);
  };
  if (auto it = root.find("record_ms"); it != root.end()) cfg.record_ms = bool_of(it->second, "record_ms");
  if (auto it = root.find("report"); it != root.end()) cfg.with_report = bool_of(it->second, "report");
  return cfg;
}

inline CampaignConfig load_campaign(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return campaign_from_document(parse_config(ss.str()));
}

}  // namespace dpbai

#endif  // DPBAI_CONFIG_HPP_
