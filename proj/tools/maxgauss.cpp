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

// Batch front end: parse an experiment configuration, run one of the
// bound / tune / simulate / verify pipelines and emit machine-readable
// reports.
//
// Exit codes: 0 success, 1 unreadable config, 2 constraint or domain
// error, 3 verification failure.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "maxgauss/maxgauss.hpp"

namespace {

using maxgauss::Command;
using maxgauss::RunConfig;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDomain = 2;
constexpr int kExitVerifyFailed = 3;

std::string default_out(const RunConfig& rc) {
  return command_name(rc.command) + "_report." +
         (rc.format == maxgauss::ReportFormat::json ? "json" : "csv");
}

void write_json(const RunConfig& rc, const std::string& path, json payload) {
  const json env = maxgauss::io::report_envelope(command_name(rc.command),
                                                 std::move(payload));
  maxgauss::io::write_text_file(path, env.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
}

int run_bound(const RunConfig& rc) {
  if (!rc.has_params) throw maxgauss::ConfigError("missing required field 'params.gamma'");
  if (rc.profile_source == maxgauss::MomentSource::monte_carlo && !rc.has_seed)
    throw maxgauss::ConfigError("missing required field 'run.seed' "
                                "(monte_carlo moment profile needs a seed)");
  const maxgauss::MomentProfile profile = maxgauss::moment_profile(
      rc.spec, rc.params.iota, rc.reps, rc.seed, rc.profile_source);
  const maxgauss::BoundReport report = maxgauss::l_n(rc.params, profile);

  const std::string out = rc.out_path.empty() ? default_out(rc) : rc.out_path;
  if (rc.format == maxgauss::ReportFormat::csv) {
    maxgauss::io::write_text_file(out, maxgauss::io::bound_csv(report));
    std::cout << "wrote " << out << "\n";
  } else {
    write_json(rc, out,
               json{{"spec", maxgauss::io::to_json(rc.spec)},
                    {"params", maxgauss::io::to_json(rc.params)},
                    {"profile", maxgauss::io::to_json(profile)},
                    {"bound_report", maxgauss::io::to_json(report)}});
  }
  std::cout << "l_n = " << report.l_n << ", radius = " << report.radius
            << ", prob_bound = " << report.prob_bound << "\n";
  return kExitOk;
}

int run_tune(const RunConfig& rc) {
  if (rc.profile_source == maxgauss::MomentSource::monte_carlo && !rc.has_seed)
    throw maxgauss::ConfigError("missing required field 'run.seed' "
                                "(monte_carlo moment profile needs a seed)");
  maxgauss::TuneRequest req;
  req.profile = maxgauss::moment_profile(rc.spec, rc.params.iota, rc.reps, rc.seed,
                                         rc.profile_source);
  req.d = rc.spec.d;
  req.objective = rc.tune_objective;
  req.budget = rc.tune_budget;
  req.radius_cap = rc.tune_radius_cap;
  req.grid_points_per_axis = rc.tune_grid_points;
  req.refine_iters = rc.tune_refine_iters;

  const maxgauss::TuneResult result = maxgauss::optimize(req);
  const std::string out = rc.out_path.empty() ? default_out(rc) : rc.out_path;
  write_json(rc, out, maxgauss::io::to_json(result));
  if (!result.feasible) {
    std::cerr << "tune: infeasible; best constraint value on the grid was "
              << result.grid_min_constraint << " at gamma=" << result.grid_min_gamma
              << " delta=" << result.grid_min_delta << "\n";
    return kExitDomain;
  }
  std::cout << "gamma = " << result.gamma << ", delta = " << result.delta
            << ", objective met with prob_bound = " << result.report.prob_bound
            << ", radius = " << result.report.radius << "\n";
  return kExitOk;
}

int run_simulate(const RunConfig& rc) {
  if (!rc.has_params) throw maxgauss::ConfigError("missing required field 'params.gamma'");
  if (!rc.has_seed) throw maxgauss::ConfigError("missing required field 'run.seed'");
  const maxgauss::ExperimentResult er =
      maxgauss::run_experiment(rc.spec, rc.params, rc.reps, rc.seed, rc.workers);

  long violations = 0;
  for (const auto& row : er.strassen_grid) violations += row.violated ? 1 : 0;

  if (rc.format == maxgauss::ReportFormat::csv) {
    const std::string base = rc.out_path.empty() ? "simulate_report" : rc.out_path;
    maxgauss::io::write_text_file(base + ".samples.csv", maxgauss::io::samples_csv(er));
    maxgauss::io::write_text_file(base + ".strassen.csv", maxgauss::io::strassen_csv(er));
    std::cout << "wrote " << base << ".samples.csv and " << base << ".strassen.csv\n";
  } else {
    const std::string out = rc.out_path.empty() ? default_out(rc) : rc.out_path;
    write_json(rc, out, maxgauss::io::to_json(er));
  }
  std::cout << "kolmogorov = " << er.kolmogorov << ", grid violations = " << violations
            << " of " << er.strassen_grid.size() << "\n";
  return kExitOk;
}

int run_verify(const RunConfig& rc) {
  if (!rc.has_seed) throw maxgauss::ConfigError("missing required field 'run.seed'");
  const std::vector<maxgauss::SuiteResult> suites = maxgauss::run_verify_suites(rc.seed);

  bool all_pass = true;
  json arr = json::array();
  for (const auto& s : suites) {
    all_pass = all_pass && s.pass();
    arr.push_back(json{{"name", s.name},
                       {"cases", s.cases},
                       {"failures", s.failures},
                       {"worst", maxgauss::io::enc(s.worst)},
                       {"pass", s.pass()}});
    std::cout << (s.pass() ? "[PASS] " : "[FAIL] ") << s.name << ": " << s.cases - s.failures
              << "/" << s.cases << " cases\n";
  }
  const std::string out = rc.out_path.empty() ? default_out(rc) : rc.out_path;
  write_json(rc, out, json{{"suites", arr}, {"all_pass", all_pass}});
  return all_pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian comparison bounds for maxima of sums: bound calculator, "
               "parameter tuner and Monte Carlo verification engine"};
  app.require_subcommand(1);

  std::string config_path;
  std::int64_t seed_flag = -1;
  std::int64_t reps_flag = -1;
  std::string out_flag;
  std::string format_flag;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--seed", seed_flag, "override run.seed");
    sub->add_option("--reps", reps_flag, "override run.reps");
    sub->add_option("--out", out_flag, "override run.out");
    sub->add_option("--format", format_flag, "override run.format (json|csv)");
  };
  add_common(app.add_subcommand("bound", "evaluate the comparison bound"));
  add_common(app.add_subcommand("tune", "search (gamma, delta) under a constraint"));
  add_common(app.add_subcommand("simulate", "run the Monte Carlo distributional check"));
  add_common(app.add_subcommand("verify", "run the property suites"));

  CLI11_PARSE(app, argc, argv);

  try {
    const Command command = maxgauss::command_from_name(app.get_subcommands().front()->get_name());
    const maxgauss::ParsedConfig cfg = maxgauss::ParsedConfig::from_file(config_path);
    RunConfig rc = maxgauss::build_run_config(command, cfg);
    maxgauss::apply_env_overrides(rc);
    if (seed_flag >= 0) {
      rc.seed = static_cast<std::uint64_t>(seed_flag);
      rc.has_seed = true;
    }
    if (reps_flag >= 0) rc.reps = static_cast<std::uint64_t>(reps_flag);
    if (!out_flag.empty()) rc.out_path = out_flag;
    if (!format_flag.empty()) {
      if (format_flag == "json")
        rc.format = maxgauss::ReportFormat::json;
      else if (format_flag == "csv")
        rc.format = maxgauss::ReportFormat::csv;
      else
        throw maxgauss::ConfigError("flag --format: expected json or csv, got '" +
                                    format_flag + "'");
    }

    switch (command) {
      case Command::bound: return run_bound(rc);
      case Command::tune: return run_tune(rc);
      case Command::simulate: return run_simulate(rc);
      default: return run_verify(rc);
    }
  } catch (const maxgauss::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const maxgauss::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const maxgauss::ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
