#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <cstring>

#include "maxgauss/report_io.hpp"
#include "maxgauss/run_config.hpp"

using namespace maxgauss;
using json = nlohmann::json;

namespace {

const char* kSampleConfig = R"(# comment line
command = simulate

[dist]
family = sym_pareto
alpha = 2.75          # tail index
covariance = ar1
rho = 0.3
n = 10
d = 5

[params]
gamma = 4.0
delta = 0.5
iota = 0.5

[run]
reps = 2000
seed = 42
out = /tmp/maxgauss_test_report.json
format = json
)";

}  // namespace

TEST_CASE("config parser handles sections, dotted keys and comments", "[cli]") {
  const ParsedConfig cfg = ParsedConfig::from_text(kSampleConfig);
  REQUIRE(cfg.get_string("dist.family") == "sym_pareto");
  REQUIRE(cfg.get_double("dist.alpha") == 2.75);
  REQUIRE(cfg.get_u64("run.seed") == 42);

  const ParsedConfig dotted = ParsedConfig::from_text("dist.n = 3\ndist.d=2\n");
  REQUIRE(dotted.get_u64("dist.n") == 3);
  REQUIRE(dotted.get_u64("dist.d") == 2);
}

TEST_CASE("config errors name the offending field", "[cli]") {
  const ParsedConfig cfg = ParsedConfig::from_text("dist.n = banana\n");
  try {
    cfg.get_u64("dist.n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find("dist.n") != std::string::npos);
  }
  try {
    cfg.get_string("run.seed");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find("run.seed") != std::string::npos);
  }
  REQUIRE_THROWS_AS(ParsedConfig::from_text("[unterminated\n"), ConfigError);
  REQUIRE_THROWS_AS(ParsedConfig::from_text("no equals sign\n"), ConfigError);
  REQUIRE_THROWS_AS(ParsedConfig::from_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("run config builder enforces per-command requirements", "[cli]") {
  const ParsedConfig cfg = ParsedConfig::from_text(kSampleConfig);
  const RunConfig rc = build_run_config(Command::simulate, cfg);
  REQUIRE(rc.spec.family == Family::sym_pareto);
  REQUIRE(rc.spec.tail_param == 2.75);
  REQUIRE(rc.has_params);
  REQUIRE(rc.params.d == 5);
  REQUIRE(rc.has_seed);
  REQUIRE(rc.reps == 2000);

  // command mismatch between config and CLI is a config error
  REQUIRE_THROWS_AS(build_run_config(Command::bound, cfg), ConfigError);

  const ParsedConfig missing = ParsedConfig::from_text("dist.family = gaussian\n");
  REQUIRE_THROWS_AS(build_run_config(Command::simulate, missing), ConfigError);
}

TEST_CASE("environment overrides seed and out path only", "[cli]") {
  const ParsedConfig cfg = ParsedConfig::from_text(kSampleConfig);
  RunConfig rc = build_run_config(Command::simulate, cfg);
  setenv("MAXGAUSS_SEED", "777", 1);
  setenv("MAXGAUSS_OUT", "/tmp/other.json", 1);
  apply_env_overrides(rc);
  unsetenv("MAXGAUSS_SEED");
  unsetenv("MAXGAUSS_OUT");
  REQUIRE(rc.seed == 777);
  REQUIRE(rc.out_path == "/tmp/other.json");
  REQUIRE(rc.reps == 2000);  // untouched

  setenv("MAXGAUSS_SEED", "not_a_number", 1);
  REQUIRE_THROWS_AS(apply_env_overrides(rc), ConfigError);
  unsetenv("MAXGAUSS_SEED");
}

TEST_CASE("experiment reports round-trip through JSON exactly", "[cli]") {
  DistributionSpec spec;
  spec.family = Family::student_t;
  spec.tail_param = 4.5;
  spec.covariance = CovarianceModel::equicorr;
  spec.rho = 0.25;
  spec.n = 3;
  spec.d = 2;
  const SmoothingParams params{2.0, 1.0, 0.5, 2};
  const ExperimentResult er = run_experiment(spec, params, 1000, 31);

  const json j = io::to_json(er);
  const std::string text = j.dump();
  const ExperimentResult back = io::experiment_from_json(json::parse(text));

  REQUIRE(back.z_samples == er.z_samples);
  REQUIRE(back.z_dagger_samples == er.z_dagger_samples);
  REQUIRE(back.kolmogorov == er.kolmogorov);
  REQUIRE(back.seed == er.seed);
  REQUIRE(back.spec.rho == er.spec.rho);
  REQUIRE(back.profile.c_sum == er.profile.c_sum);
  REQUIRE(back.bound_report.l_n == er.bound_report.l_n);
  REQUIRE(back.strassen_grid.size() == er.strassen_grid.size());
  for (std::size_t k = 0; k < er.strassen_grid.size(); ++k) {
    REQUIRE(back.strassen_grid[k].threshold == er.strassen_grid[k].threshold);
    REQUIRE(back.strassen_grid[k].lhs == er.strassen_grid[k].lhs);
    REQUIRE(back.strassen_grid[k].bound == er.strassen_grid[k].bound);
    REQUIRE(back.strassen_grid[k].violated == er.strassen_grid[k].violated);
  }
}

TEST_CASE("infinite moments survive the JSON round trip", "[cli]") {
  DistributionSpec spec;
  spec.family = Family::sym_pareto;
  spec.tail_param = 2.75;  // third absolute moment diverges
  spec.n = 2;
  spec.d = 1;
  const MomentProfile p = moment_profile(spec, 0.5, 0, 0, MomentSource::analytic);
  REQUIRE(std::isinf(p.third_max_x));
  const MomentProfile back =
      io::profile_from_json(json::parse(io::to_json(p).dump()));
  REQUIRE(std::isinf(back.third_max_x));
  REQUIRE(back.c_sum == p.c_sum);
}

TEST_CASE("tune results round-trip through JSON", "[cli]") {
  DistributionSpec spec;
  spec.family = Family::rademacher;
  spec.n = 1;
  spec.d = 1;
  TuneRequest req;
  req.profile = moment_profile(spec, 0.5, 0, 0, MomentSource::analytic);
  req.d = 1;
  req.objective = TuneObjective::minimize_radius_given_budget;
  req.budget = 0.9;
  req.grid_points_per_axis = 16;
  req.refine_iters = 20;
  const TuneResult t = optimize(req);
  const TuneResult back = io::tune_from_json(json::parse(io::to_json(t).dump()));
  REQUIRE(back.feasible == t.feasible);
  REQUIRE(back.gamma == t.gamma);
  REQUIRE(back.delta == t.delta);
  REQUIRE(back.report.prob_bound == t.report.prob_bound);
  REQUIRE(back.trace.size() == t.trace.size());
  REQUIRE(back.trace.back().objective == t.trace.back().objective);
}

TEST_CASE("17 significant digits reproduce doubles exactly", "[cli]") {
  for (double v : {0.1, 1.0 / 3.0, 2.2250738585072014e-308, 1.7976931348623157e308,
                   -5.4321e-17, 3.141592653589793}) {
    const std::string s = io::fmt17(v);
    REQUIRE(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("csv schemas are fixed", "[cli]") {
  DistributionSpec spec;
  spec.family = Family::gaussian;
  spec.n = 2;
  spec.d = 2;
  const SmoothingParams params{2.0, 1.0, 0.5, 2};
  const ExperimentResult er = run_experiment(spec, params, 1000, 3);
  const std::string strassen = io::strassen_csv(er);
  REQUIRE(strassen.rfind("threshold,lhs,bound,violated\n", 0) == 0);
  const std::string samples = io::samples_csv(er);
  REQUIRE(samples.rfind("rep,z,z_dagger\n", 0) == 0);
  // one header plus one line per row
  REQUIRE(std::count(samples.begin(), samples.end(), '\n') ==
          static_cast<long>(er.reps) + 1);
  REQUIRE(std::count(strassen.begin(), strassen.end(), '\n') == 202);
}

TEST_CASE("report envelope carries the schema version", "[cli]") {
  const json env = io::report_envelope("bound", json{{"x", 1}});
  REQUIRE(env.at("schema_version").get<int>() == kReportSchemaVersion);
  REQUIRE(env.at("command").get<std::string>() == "bound");
}

TEST_CASE("bound csv is a one-row summary that parses back", "[cli]") {
  DistributionSpec spec;
  spec.family = Family::rademacher;
  spec.n = 1;
  spec.d = 1;
  const MomentProfile p = moment_profile(spec, 1.0, 0, 0, MomentSource::analytic);
  const BoundReport r = l_n(SmoothingParams{2.0, 2.0, 1.0, 1}, p);
  const std::string csv = io::bound_csv(r);
  REQUIRE(csv.rfind("epsilon,c_gamma,term1,term2,l_n,radius,prob_bound\n", 0) == 0);
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 2);
  const auto comma = csv.find(',', csv.find('\n') + 1);
  const double eps_back =
      std::strtod(csv.substr(csv.find('\n') + 1, comma).c_str(), nullptr);
  REQUIRE(eps_back == r.epsilon);
}
