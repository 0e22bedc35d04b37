// Acceptance suite: one hard pass/fail line per criterion, exit 0 only
// if the requested criterion holds at its stated tolerance. Run with a
// criterion number 1..11, or no argument for all of them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "maxgauss/maxgauss.hpp"
#include "support/oracles.hpp"

using namespace maxgauss;

namespace {

struct Criterion {
  int id;
  const char* label;
  bool (*run)();
};

bool g_ok = true;

void check(bool cond, const std::string& what) {
  if (!cond) {
    std::cout << "       violated: " << what << "\n";
    g_ok = false;
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// E|N(0,1)|^q, test-side closed form.
double gauss_abs_moment(double q) {
  return std::pow(2.0, q / 2.0) * std::tgamma((q + 1.0) / 2.0) / std::sqrt(M_PI);
}

// --- criterion 1: smooth-max sandwich --------------------------------------

bool c1_sandwich() {
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteResult res = suite_smooth_max_sandwich(100000, 0xC0FFEE01);
  const double secs = seconds_since(t0);
  check(res.cases == 100000, "expected 1e5 cases");
  check(res.failures == 0, "sandwich violations beyond 8 eps: " +
                               std::to_string(res.failures));
  check(secs < 10.0, "runtime " + std::to_string(secs) + "s exceeds 10s");
  std::printf("       1e5 cases, worst scaled violation %.3e, %.2fs\n", res.worst, secs);
  return g_ok;
}

// --- criterion 2: derivative correctness ------------------------------------

bool c2_derivatives() {
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteResult psi_fd = suite_psi_derivatives_fd(1000, 0xC0FFEE02);
  const SuiteResult g_fd = suite_g_derivatives_fd(1000, 0xC0FFEE03);
  const double secs = seconds_since(t0);
  check(psi_fd.cases == 1000 && g_fd.cases == 1000, "expected 1e3 points each");
  check(psi_fd.failures == 0, "psi derivative mismatches: " +
                                  std::to_string(psi_fd.failures));
  check(g_fd.failures == 0, "g derivative mismatches: " + std::to_string(g_fd.failures));
  check(secs < 30.0, "runtime " + std::to_string(secs) + "s exceeds 30s");
  std::printf("       psi worst %.3e, g worst %.3e (scaled), %.2fs\n", psi_fd.worst,
              g_fd.worst, secs);
  return g_ok;
}

// --- criterion 3: smoothed-indicator contract -------------------------------

bool c3_indicator_contract() {
  const auto t0 = std::chrono::steady_clock::now();
  double c_impl = 0.0;
  const SuiteResult res = suite_indicator_certification(50, 0xC0FFEE04, &c_impl, 10000);
  const double secs = seconds_since(t0);
  check(res.cases == 50, "expected 50 randomized sets");
  check(res.failures == 0, "certification failures: " + std::to_string(res.failures));
  check(c_impl <= 4.0, "C_impl " + std::to_string(c_impl) + " exceeds 4");
  check(c_impl > 0.0, "C_impl degenerate");
  check(secs < 60.0, "runtime " + std::to_string(secs) + "s exceeds 60s");
  std::printf("       50 sets certified, C_impl = %.6f, %.2fs\n", c_impl, secs);
  return g_ok;
}

// --- criterion 4: third-derivative envelope ---------------------------------

bool c4_envelope() {
  const SuiteResult res = suite_third_envelope(10000, 0xC0FFEE05);
  check(res.cases == 10000, "expected 1e4 points");
  check(res.failures == 0, "envelope violations: " + std::to_string(res.failures));
  std::printf("       1e4 points, worst sum/envelope headroom %.3e\n", res.worst);
  return g_ok;
}

// --- criterion 5: truncation inequality fuzz --------------------------------

bool c5_lemma3() {
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteResult res = suite_lemma3_fuzz(1000000, 0xC0FFEE06);
  const double secs = seconds_since(t0);
  check(res.cases == 1000000, "expected 1e6 cases");
  check(res.failures == 0, "inequality violations: " + std::to_string(res.failures));
  check(secs < 5.0, "runtime " + std::to_string(secs) + "s exceeds 5s");
  std::printf("       1e6 cases, worst lhs/rhs ratio %.6f, %.2fs\n", res.worst, secs);
  return g_ok;
}

// --- criterion 6: vanishing swap terms --------------------------------------

bool c6_lindeberg_zeros() {
  const SuiteResult en = suite_lindeberg_enumerate_zeros(0xC0FFEE07);
  check(en.failures == 0,
        "enumerate-mode |I|,|II| or telescoping above 1e-8, worst " +
            std::to_string(en.worst));
  const SuiteResult mc = suite_lindeberg_mc_zeros(10000, 0xC0FFEE08);
  check(mc.failures == 0, "monte-carlo terms outside 3 se of zero");
  std::printf("       enumerate worst %.3e, mc worst |mean|/se %.3f\n", en.worst,
              mc.worst);
  return g_ok;
}

// --- criterion 7: desk-scale comparison bound --------------------------------

bool c7_desk_scale() {
  struct Tiny {
    std::size_t n, d;
    double gamma, delta, iota;
    BorelSet set;
  };
  const std::vector<Tiny> instances = {
      {1, 1, 2.0, 1.0, 1.0, BorelSet::half_line_below(0.0)},
      {2, 1, 1.5, 1.0, 0.5, BorelSet({{-0.5, 0.5}})},
      {3, 1, 3.0, 0.5, 0.0, BorelSet::half_line_below(1.0)},
      {2, 1, 1.2, 1.0, 0.25, BorelSet({{-2.0, -1.0}, {1.0, 2.0}})},
      {3, 1, 2.5, 0.6, 0.75, BorelSet::half_line_above(0.0)},
      {1, 1, 4.0, 0.3, 0.5, BorelSet({{-1.0, 1.0}})},
      {2, 1, 1.1, 1.0, 1.0, BorelSet::half_line_below(-0.2)},
      {3, 1, 2.0, 0.8, 1.0 / 3.0, BorelSet({{0.2, 1.7}})},
      {1, 2, 2.0, 1.0, 0.5, BorelSet::half_line_below(0.8)},
      {1, 3, 2.2, 0.9, 1.0, BorelSet::half_line_below(1.2)},
  };

  int idx = 0;
  for (const Tiny& tc : instances) {
    ++idx;
    DistributionSpec spec;
    spec.family = Family::rademacher;
    spec.n = tc.n;
    spec.d = tc.d;
    const SmoothingParams params{tc.gamma, tc.delta, tc.iota, tc.d};
    const SmoothIndicator g = build_g(tc.set, params);
    const LindebergResult lr =
        lindeberg_decompose(spec, params, g, LindebergMode::enumerate_exact);

    // Exact moment profile. Rademacher coordinates have |X|^q = 1 a.s.,
    // so the X functionals are exact integers; the Gaussian side uses
    // closed forms for d = 1 and the max-moment tail integral beyond.
    MomentProfile profile;
    profile.n = tc.n;
    profile.d = tc.d;
    profile.iota = tc.iota;
    profile.source = MomentSource::analytic;
    const double q = 2.0 + tc.iota;
    const double nn = static_cast<double>(tc.n);
    profile.third_max_x = nn;  // max_j sum_i |X_ij|^3 = n almost surely
    if (tc.d == 1) {
      profile.third_max_y = nn * gauss_abs_moment(3.0);
      profile.c_sum = nn * (1.0 + gauss_abs_moment(q));
    } else {
      profile.third_max_y = oracles::normal_abs_max_moment(static_cast<int>(tc.d), 3.0);
      profile.c_sum =
          1.0 + oracles::normal_abs_max_moment(static_cast<int>(tc.d), q);
    }
    const BoundReport report = l_n(params, profile);
    check(std::abs(lr.total_difference) <= report.l_n,
          "instance " + std::to_string(idx) + ": |E f(S_n) - E f(S_n')| = " +
              std::to_string(std::abs(lr.total_difference)) + " > L_n = " +
              std::to_string(report.l_n));
    check(lr.telescope_gap <= 1e-8,
          "instance " + std::to_string(idx) + ": telescoping gap " +
              std::to_string(lr.telescope_gap));
  }
  std::printf("       10 enumerable instances, zero violations\n");
  return g_ok;
}

// --- criterion 8: gaussian null ----------------------------------------------

bool c8_gaussian_null() {
  DistributionSpec spec;
  spec.family = Family::gaussian;
  spec.n = 20;
  spec.d = 10;
  const SmoothingParams params{2.0, 1.0, 0.5, 10};
  const ExperimentResult er = run_experiment(spec, params, 10000, 0xC0FFEE09);
  const double dkw = 2.0 * std::sqrt(std::log(2.0 / 0.001) / (2.0 * 10000.0));
  check(er.kolmogorov < dkw, "kolmogorov " + std::to_string(er.kolmogorov) +
                                 " not below DKW threshold " + std::to_string(dkw));
  long bad = 0;
  for (const StrassenRow& row : er.strassen_grid) bad += row.lhs > 0.0 ? 1 : 0;
  check(er.strassen_grid.size() == 201, "grid must have 201 thresholds");
  check(bad == 0, "positive lhs at " + std::to_string(bad) + " thresholds");
  std::printf("       kolmogorov %.5f < DKW %.5f, all 201 lhs <= 0\n", er.kolmogorov,
              dkw);
  return g_ok;
}

// --- criterion 9: heavy-tail regime ------------------------------------------

bool c9_heavy_tail() {
  const auto t0 = std::chrono::steady_clock::now();
  DistributionSpec spec;
  spec.family = Family::sym_pareto;
  spec.tail_param = 2.75;
  spec.n = 50;
  spec.d = 20;

  // Tune against the same moment draw the experiment will report; the
  // (2+iota)-th moment estimator of an alpha = 2.75 tail has enormous
  // sampling variance, so budgeting against an independent draw would
  // say nothing about the grid actually checked.
  TuneRequest req;
  req.profile = moment_profile(spec, 0.5, 10000, 0xC0FFEE0B);
  req.d = spec.d;
  req.objective = TuneObjective::minimize_radius_given_budget;
  req.budget = 0.9;
  const TuneResult tuned = optimize(req);
  check(tuned.feasible, "tuner found no feasible (gamma, delta)");
  if (!tuned.feasible) return g_ok;

  const SmoothingParams params{tuned.gamma, tuned.delta, 0.5, spec.d};
  const ExperimentResult er = run_experiment(spec, params, 10000, 0xC0FFEE0B);
  long bad = 0;
  for (const StrassenRow& row : er.strassen_grid) bad += row.violated ? 1 : 0;
  const double secs = seconds_since(t0);
  check(bad == 0, "bound violated at " + std::to_string(bad) + " thresholds");
  check(er.bound_report.prob_bound <= 0.9 + 1e-12,
        "tuned bound above the requested budget");
  check(er.bound_report.prob_bound < 1.0, "bound clipped at 1: the check is vacuous");
  check(secs < 120.0, "runtime " + std::to_string(secs) + "s exceeds 2min");
  std::printf("       tuned gamma=%.4g delta=%.4g, bound %.4f, radius %.4g, "
              "0 violations, %.1fs\n",
              tuned.gamma, tuned.delta, er.bound_report.prob_bound,
              er.bound_report.radius, secs);
  return g_ok;
}

// --- criterion 10: tuner soundness -------------------------------------------

bool c10_tuner() {
  struct Fixture {
    MomentProfile profile;
    std::size_t d;
    TuneObjective objective;
    double budget, radius_cap;
  };
  auto mk = [](double tmx, double tmy, double cs, std::size_t n, std::size_t d,
               double iota) {
    MomentProfile p;
    p.third_max_x = tmx;
    p.third_max_y = tmy;
    p.c_sum = cs;
    p.n = n;
    p.d = d;
    p.iota = iota;
    p.source = MomentSource::analytic;
    return p;
  };
  const std::vector<Fixture> fixtures = {
      {mk(2.0, 3.2, 10.0, 2, 5, 0.5), 5, TuneObjective::minimize_radius_given_budget,
       0.5, 0.0},
      {mk(50.0, 40.0, 600.0, 50, 20, 0.5), 20,
       TuneObjective::minimize_radius_given_budget, 0.9, 0.0},
      {mk(1.0, 1.6, 2.6, 1, 1, 1.0), 1, TuneObjective::minimize_radius_given_budget,
       0.9, 0.0},
      {mk(5.0, 6.0, 30.0, 10, 8, 0.25), 8, TuneObjective::minimize_bound_given_radius,
       0.0, 20.0},
      {mk(0.5, 0.8, 3.0, 4, 3, 0.0), 3, TuneObjective::minimize_bound_given_radius, 0.0,
       10.0},
  };

  int idx = 0;
  for (const Fixture& fx : fixtures) {
    ++idx;
    TuneRequest req;
    req.profile = fx.profile;
    req.d = fx.d;
    req.objective = fx.objective;
    req.budget = fx.budget;
    req.radius_cap = fx.radius_cap;
    const TuneResult res = optimize(req);
    check(res.feasible, "fixture " + std::to_string(idx) + ": infeasible");
    if (!res.feasible) continue;

    check(res.gamma * res.delta > 1.0,
          "fixture " + std::to_string(idx) + ": gamma*delta <= 1");
    const double obj = fx.objective == TuneObjective::minimize_radius_given_budget
                           ? res.report.radius
                           : res.report.prob_bound_raw;
    if (fx.objective == TuneObjective::minimize_radius_given_budget)
      check(res.report.prob_bound <= fx.budget,
            "fixture " + std::to_string(idx) + ": budget constraint broken");
    else
      check(res.report.radius <= fx.radius_cap,
            "fixture " + std::to_string(idx) + ": radius constraint broken");

    // exhaustive 256 x 256 log-grid reference
    double grid_best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 256; ++a) {
      const double gamma =
          std::exp(std::log(req.gamma_lo) + (std::log(req.gamma_hi) -
                                             std::log(req.gamma_lo)) *
                                                a / 255.0);
      for (int b = 0; b < 256; ++b) {
        const double delta =
            std::exp(std::log(req.delta_lo) + (std::log(req.delta_hi) -
                                               std::log(req.delta_lo)) *
                                                  b / 255.0);
        if (!(gamma * delta > 1.0)) continue;
        BoundReport r;
        try {
          r = l_n(SmoothingParams{gamma, delta, fx.profile.iota, fx.d}, fx.profile);
        } catch (const DomainError&) {
          continue;  // epsilon rounds to 1 on the knife edge
        }
        if (fx.objective == TuneObjective::minimize_radius_given_budget) {
          if (r.prob_bound <= fx.budget) grid_best = std::min(grid_best, r.radius);
        } else {
          if (r.radius <= fx.radius_cap) grid_best = std::min(grid_best, r.prob_bound_raw);
        }
      }
    }
    check(obj <= grid_best * 1.01,
          "fixture " + std::to_string(idx) + ": objective " + std::to_string(obj) +
              " worse than 1% over grid best " + std::to_string(grid_best));
  }
  std::printf("       5 fixtures within 1%% of the 256x256 grid, constraints exact\n");
  return g_ok;
}

// --- criterion 11: determinism across worker counts --------------------------

bool c11_determinism() {
  DistributionSpec spec;
  spec.family = Family::sym_pareto;
  spec.tail_param = 3.5;
  spec.n = 10;
  spec.d = 5;
  spec.covariance = CovarianceModel::ar1;
  spec.rho = 0.4;
  const SmoothingParams params{3.0, 0.8, 0.5, 5};

  const ExperimentResult one = run_experiment(spec, params, 2000, 0xC0FFEE0C, 1);
  const ExperimentResult four = run_experiment(spec, params, 2000, 0xC0FFEE0C, 4);

  nlohmann::json ja = io::to_json(one);
  nlohmann::json jb = io::to_json(four);
  ja.erase("workers");  // the report records its own worker count
  jb.erase("workers");
  check(ja.dump() == jb.dump(), "JSON reports differ between 1 and 4 workers");
  check(io::samples_csv(one) == io::samples_csv(four), "sample CSVs differ");
  check(io::strassen_csv(one) == io::strassen_csv(four), "strassen CSVs differ");
  std::printf("       1-worker and 4-worker reports are byte-identical\n");
  return g_ok;
}

const Criterion kCriteria[] = {
    {1, "smooth-max sandwich, 1e5 randomized cases", c1_sandwich},
    {2, "derivative correctness vs finite differences", c2_derivatives},
    {3, "smoothed-indicator contract, 50 randomized sets", c3_indicator_contract},
    {4, "composite third-derivative envelope, 1e4 points", c4_envelope},
    {5, "truncation inequality fuzz, 1e6 cases", c5_lemma3},
    {6, "vanishing swap terms, enumerate + monte carlo", c6_lindeberg_zeros},
    {7, "desk-scale comparison bound on 10 instances", c7_desk_scale},
    {8, "gaussian null: DKW gate and nonpositive grid", c8_gaussian_null},
    {9, "heavy-tail regime with tuned parameters", c9_heavy_tail},
    {10, "tuner within 1% of the exhaustive grid", c10_tuner},
    {11, "byte-identical reports across worker counts", c11_determinism},
};

bool run_one(const Criterion& c) {
  g_ok = true;
  std::printf("[ RUN] criterion %d: %s\n", c.id, c.label);
  bool ok = false;
  try {
    ok = c.run();
  } catch (const std::exception& e) {
    std::cout << "       exception: " << e.what() << "\n";
    ok = false;
  }
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", c.id, c.label);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  bool all_ok = true;
  if (argc > 1) {
    const int want = std::atoi(argv[1]);
    for (const Criterion& c : kCriteria)
      if (c.id == want) return run_one(c) ? 0 : 1;
    std::cerr << "unknown criterion " << want << "\n";
    return 2;
  }
  for (const Criterion& c : kCriteria) all_ok = run_one(c) && all_ok;
  return all_ok ? 0 : 1;
}
