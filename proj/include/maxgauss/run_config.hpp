/*
   Copyright 2026 The maxgauss Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "maxgauss/bounds.hpp"
#include "maxgauss/distribution.hpp"
#include "maxgauss/report_io.hpp"
#include "maxgauss/tune.hpp"

namespace maxgauss {

/// Config file problems carry the offending field (or line) in the
/// message and map to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { bound, tune, simulate, verify };

inline std::string command_name(Command c) {
  switch (c) {
    case Command::bound: return "bound";
    case Command::tune: return "tune";
    case Command::simulate: return "simulate";
    default: return "verify";
  }
}

inline Command command_from_name(const std::string& s) {
  if (s == "bound") return Command::bound;
  if (s == "tune") return Command::tune;
  if (s == "simulate") return Command::simulate;
  if (s == "verify") return Command::verify;
  throw ConfigError("unknown command '" + s + "'");
}

/// Flat key/value view of a config file. Grammar (documented in the
/// README): '#' starts a comment, blank lines are skipped, '[section]'
/// prefixes the keys that follow, and 'a.b = value' spells the prefix
/// inline. Later assignments win.
class ParsedConfig {
 public:
  static ParsedConfig from_text(const std::string& text) {
    ParsedConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": unterminated section header");
        section = trim(trimmed.substr(1, trimmed.size() - 2));
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected 'key = value'");
      std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      if (!section.empty() && key.find('.') == std::string::npos)
        key = section + "." + key;
      cfg.kv_[key] = value;
    }
    return cfg;
  }

  static ParsedConfig from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_text(ss.str());
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required field '" + key + "'");
    return it->second;
  }

  std::string get_string_or(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
  }
  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  std::uint64_t get_u64(const std::string& key) const {
    return parse_u64(key, get_string(key));
  }
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_u64(key) : fallback;
  }

  bool get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("field '" + key + "': expected a boolean, got '" + v + "'");
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static double parse_double(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return x;
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': expected a number, got '" + v + "'");
    }
  }

  static std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const unsigned long long x = std::stoull(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing characters");
      return x;
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': expected a nonnegative integer, got '" + v +
                        "'");
    }
  }

  std::map<std::string, std::string> kv_;
};

enum class ReportFormat { json, csv };

/// Everything one CLI invocation needs, fully resolved.
struct RunConfig {
  Command command = Command::bound;
  DistributionSpec spec;
  bool has_params = false;
  SmoothingParams params;
  MomentSource profile_source = MomentSource::monte_carlo;
  std::uint64_t reps = 0;
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out_path;
  ReportFormat format = ReportFormat::json;
  // tune settings
  TuneObjective tune_objective = TuneObjective::minimize_radius_given_budget;
  double tune_budget = 0.0;
  double tune_radius_cap = 0.0;
  std::size_t tune_grid_points = 48;
  std::size_t tune_refine_iters = 40;
};

inline DistributionSpec spec_from_config(const ParsedConfig& cfg) {
  DistributionSpec s;
  const std::string fam = cfg.get_string("dist.family");
  try {
    s.family = io::family_from_name(fam);
  } catch (const DomainError&) {
    throw ConfigError("field 'dist.family': unknown family '" + fam + "'");
  }
  if (s.family == Family::student_t) s.tail_param = cfg.get_double("dist.dof");
  if (s.family == Family::sym_pareto) s.tail_param = cfg.get_double("dist.alpha");
  const std::string cov = cfg.get_string_or("dist.covariance", "identity");
  try {
    s.covariance = io::covariance_from_name(cov);
  } catch (const DomainError&) {
    throw ConfigError("field 'dist.covariance': unknown model '" + cov + "'");
  }
  if (s.covariance != CovarianceModel::identity) s.rho = cfg.get_double("dist.rho");
  s.n = static_cast<std::size_t>(cfg.get_u64("dist.n"));
  s.d = static_cast<std::size_t>(cfg.get_u64("dist.d"));
  s.standardized = cfg.get_bool_or("dist.standardized", true);
  return s;
}

inline RunConfig build_run_config(Command command, const ParsedConfig& cfg) {
  RunConfig rc;
  rc.command = command;

  if (cfg.has("command")) {
    const Command declared = command_from_name(cfg.get_string("command"));
    if (declared != command)
      throw ConfigError("field 'command': config says '" +
                        command_name(declared) + "' but the CLI invoked '" +
                        command_name(command) + "'");
  }

  if (command != Command::verify) rc.spec = spec_from_config(cfg);

  const bool needs_params = command == Command::bound || command == Command::simulate;
  if (needs_params || cfg.has("params.gamma")) {
    rc.params.gamma = cfg.get_double("params.gamma");
    rc.params.delta = cfg.get_double("params.delta");
    rc.params.iota = cfg.get_double("params.iota");
    rc.params.d = rc.spec.d;
    rc.has_params = true;
  } else if (command == Command::tune) {
    rc.params.iota = cfg.get_double("params.iota");
  }

  const std::string src = cfg.get_string_or("profile.source", "monte_carlo");
  if (src == "analytic")
    rc.profile_source = MomentSource::analytic;
  else if (src == "monte_carlo")
    rc.profile_source = MomentSource::monte_carlo;
  else
    throw ConfigError("field 'profile.source': expected analytic or monte_carlo, got '" +
                      src + "'");

  rc.reps = cfg.get_u64_or("run.reps", 10000);
  if (cfg.has("run.seed")) {
    rc.seed = cfg.get_u64("run.seed");
    rc.has_seed = true;
  }
  rc.workers = static_cast<std::size_t>(cfg.get_u64_or("run.workers", 1));
  rc.out_path = cfg.get_string_or("run.out", "");
  const std::string fmt = cfg.get_string_or("run.format", "json");
  if (fmt == "json")
    rc.format = ReportFormat::json;
  else if (fmt == "csv")
    rc.format = ReportFormat::csv;
  else
    throw ConfigError("field 'run.format': expected json or csv, got '" + fmt + "'");

  if (command == Command::tune) {
    const std::string obj = cfg.get_string_or("tune.objective", "min_radius");
    if (obj == "min_radius") {
      rc.tune_objective = TuneObjective::minimize_radius_given_budget;
      rc.tune_budget = cfg.get_double("tune.budget");
    } else if (obj == "min_bound") {
      rc.tune_objective = TuneObjective::minimize_bound_given_radius;
      rc.tune_radius_cap = cfg.get_double("tune.radius_cap");
    } else {
      throw ConfigError("field 'tune.objective': expected min_radius or min_bound, got '" +
                        obj + "'");
    }
    rc.tune_grid_points = static_cast<std::size_t>(cfg.get_u64_or("tune.grid_points", 48));
    rc.tune_refine_iters = static_cast<std::size_t>(cfg.get_u64_or("tune.refine_iters", 40));
  }

  return rc;
}

/// Environment may override exactly two knobs: MAXGAUSS_SEED and
/// MAXGAUSS_OUT. Command-line flags still take precedence over both.
inline void apply_env_overrides(RunConfig& rc) {
  if (const char* s = std::getenv("MAXGAUSS_SEED")) {
    try {
      rc.seed = std::stoull(s);
      rc.has_seed = true;
    } catch (const std::exception&) {
      throw ConfigError("environment MAXGAUSS_SEED: expected an integer, got '" +
                        std::string(s) + "'");
    }
  }
  if (const char* o = std::getenv("MAXGAUSS_OUT")) rc.out_path = o;
}

}  // namespace maxgauss
