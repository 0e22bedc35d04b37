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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxgauss/bounds.hpp"
#include "maxgauss/distribution.hpp"
#include "maxgauss/errors.hpp"
#include "maxgauss/simulate.hpp"
#include "maxgauss/smoothing_params.hpp"
#include "maxgauss/tune.hpp"

namespace maxgauss {

inline constexpr int kReportSchemaVersion = 1;

namespace io {

using json = nlohmann::json;

/// Doubles in reports may legitimately be infinite (closed-form moments
/// beyond the tail index). JSON has no inf literal, so those encode as
/// strings and decode back; everything finite stays a plain number,
/// which nlohmann round-trips exactly.
inline json enc(double v) {
  if (std::isnan(v)) return json("nan");
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

inline double dec(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw DomainError("report decode: unexpected numeric string '" + s + "'");
  }
  return j.get<double>();
}

/// 17 significant digits: enough to reproduce any double exactly.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json to_json(const SmoothingParams& p) {
  return json{{"gamma", enc(p.gamma)}, {"delta", enc(p.delta)}, {"iota", enc(p.iota)},
              {"d", p.d}};
}

inline SmoothingParams params_from_json(const json& j) {
  return SmoothingParams{dec(j.at("gamma")), dec(j.at("delta")), dec(j.at("iota")),
                         j.at("d").get<std::size_t>()};
}

inline json to_json(const DistributionSpec& s) {
  return json{{"family", family_name(s.family)},
              {"tail_param", enc(s.tail_param)},
              {"covariance", covariance_name(s.covariance)},
              {"rho", enc(s.rho)},
              {"n", s.n},
              {"d", s.d},
              {"standardized", s.standardized}};
}

inline Family family_from_name(const std::string& name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "rademacher") return Family::rademacher;
  if (name == "student_t") return Family::student_t;
  if (name == "sym_pareto") return Family::sym_pareto;
  throw DomainError("unknown family '" + name + "'");
}

inline CovarianceModel covariance_from_name(const std::string& name) {
  if (name == "identity") return CovarianceModel::identity;
  if (name == "equicorr") return CovarianceModel::equicorr;
  if (name == "ar1") return CovarianceModel::ar1;
  throw DomainError("unknown covariance model '" + name + "'");
}

inline DistributionSpec spec_from_json(const json& j) {
  DistributionSpec s;
  s.family = family_from_name(j.at("family").get<std::string>());
  s.tail_param = dec(j.at("tail_param"));
  s.covariance = covariance_from_name(j.at("covariance").get<std::string>());
  s.rho = dec(j.at("rho"));
  s.n = j.at("n").get<std::size_t>();
  s.d = j.at("d").get<std::size_t>();
  s.standardized = j.at("standardized").get<bool>();
  return s;
}

inline json to_json(const MomentProfile& p) {
  return json{{"third_max_x", enc(p.third_max_x)},
              {"third_max_x_se", enc(p.third_max_x_se)},
              {"third_max_y", enc(p.third_max_y)},
              {"third_max_y_se", enc(p.third_max_y_se)},
              {"c_sum", enc(p.c_sum)},
              {"c_sum_se", enc(p.c_sum_se)},
              {"n", p.n},
              {"d", p.d},
              {"iota", enc(p.iota)},
              {"source", p.source == MomentSource::analytic ? "analytic" : "monte_carlo"},
              {"mc_reps", p.mc_reps},
              {"mc_seed", p.mc_seed}};
}

inline MomentProfile profile_from_json(const json& j) {
  MomentProfile p;
  p.third_max_x = dec(j.at("third_max_x"));
  p.third_max_x_se = dec(j.at("third_max_x_se"));
  p.third_max_y = dec(j.at("third_max_y"));
  p.third_max_y_se = dec(j.at("third_max_y_se"));
  p.c_sum = dec(j.at("c_sum"));
  p.c_sum_se = dec(j.at("c_sum_se"));
  p.n = j.at("n").get<std::size_t>();
  p.d = j.at("d").get<std::size_t>();
  p.iota = dec(j.at("iota"));
  p.source = j.at("source").get<std::string>() == "analytic" ? MomentSource::analytic
                                                             : MomentSource::monte_carlo;
  p.mc_reps = j.at("mc_reps").get<std::uint64_t>();
  p.mc_seed = j.at("mc_seed").get<std::uint64_t>();
  return p;
}

inline json to_json(const BoundReport& r) {
  return json{{"epsilon", enc(r.epsilon)},
              {"c_gamma", enc(r.c_gamma)},
              {"term1", enc(r.term1)},
              {"term1_se", enc(r.term1_se)},
              {"term2", enc(r.term2)},
              {"term2_se", enc(r.term2_se)},
              {"l_n", enc(r.l_n)},
              {"l_n_se", enc(r.l_n_se)},
              {"radius", enc(r.radius)},
              {"prob_bound", enc(r.prob_bound)},
              {"prob_bound_raw", enc(r.prob_bound_raw)},
              {"clipped", r.clipped}};
}

inline BoundReport bound_report_from_json(const json& j) {
  BoundReport r;
  r.epsilon = dec(j.at("epsilon"));
  r.c_gamma = dec(j.at("c_gamma"));
  r.term1 = dec(j.at("term1"));
  r.term1_se = dec(j.at("term1_se"));
  r.term2 = dec(j.at("term2"));
  r.term2_se = dec(j.at("term2_se"));
  r.l_n = dec(j.at("l_n"));
  r.l_n_se = dec(j.at("l_n_se"));
  r.radius = dec(j.at("radius"));
  r.prob_bound = dec(j.at("prob_bound"));
  r.prob_bound_raw = dec(j.at("prob_bound_raw"));
  r.clipped = j.at("clipped").get<bool>();
  return r;
}

inline json to_json(const ExperimentResult& e) {
  json grid = json::array();
  for (const StrassenRow& row : e.strassen_grid) {
    grid.push_back(json{{"threshold", enc(row.threshold)},
                        {"lhs", enc(row.lhs)},
                        {"bound", enc(row.bound)},
                        {"violated", row.violated}});
  }
  return json{{"spec", to_json(e.spec)},
              {"params", to_json(e.params)},
              {"reps", e.reps},
              {"seed", e.seed},
              {"workers", e.workers},
              {"z_samples", e.z_samples},
              {"z_dagger_samples", e.z_dagger_samples},
              {"kolmogorov", enc(e.kolmogorov)},
              {"profile", to_json(e.profile)},
              {"bound_report", to_json(e.bound_report)},
              {"strassen_grid", grid}};
}

inline ExperimentResult experiment_from_json(const json& j) {
  ExperimentResult e;
  e.spec = spec_from_json(j.at("spec"));
  e.params = params_from_json(j.at("params"));
  e.reps = j.at("reps").get<std::uint64_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.workers = j.at("workers").get<std::size_t>();
  e.z_samples = j.at("z_samples").get<std::vector<double>>();
  e.z_dagger_samples = j.at("z_dagger_samples").get<std::vector<double>>();
  e.kolmogorov = dec(j.at("kolmogorov"));
  e.profile = profile_from_json(j.at("profile"));
  e.bound_report = bound_report_from_json(j.at("bound_report"));
  for (const json& row : j.at("strassen_grid")) {
    e.strassen_grid.push_back(StrassenRow{dec(row.at("threshold")), dec(row.at("lhs")),
                                          dec(row.at("bound")),
                                          row.at("violated").get<bool>()});
  }
  return e;
}

inline json to_json(const TuneResult& t) {
  json trace = json::array();
  for (const TracePoint& p : t.trace) {
    trace.push_back(json{{"gamma", enc(p.gamma)},
                         {"delta", enc(p.delta)},
                         {"objective", enc(p.objective)},
                         {"constraint", enc(p.constraint)},
                         {"feasible", p.feasible}});
  }
  return json{{"feasible", t.feasible},
              {"gamma", enc(t.gamma)},
              {"delta", enc(t.delta)},
              {"report", to_json(t.report)},
              {"grid_min_constraint", enc(t.grid_min_constraint)},
              {"grid_min_gamma", enc(t.grid_min_gamma)},
              {"grid_min_delta", enc(t.grid_min_delta)},
              {"trace", trace}};
}

inline TuneResult tune_from_json(const json& j) {
  TuneResult t;
  t.feasible = j.at("feasible").get<bool>();
  t.gamma = dec(j.at("gamma"));
  t.delta = dec(j.at("delta"));
  t.report = bound_report_from_json(j.at("report"));
  t.grid_min_constraint = dec(j.at("grid_min_constraint"));
  t.grid_min_gamma = dec(j.at("grid_min_gamma"));
  t.grid_min_delta = dec(j.at("grid_min_delta"));
  for (const json& p : j.at("trace")) {
    t.trace.push_back(TracePoint{dec(p.at("gamma")), dec(p.at("delta")),
                                 dec(p.at("objective")), dec(p.at("constraint")),
                                 p.at("feasible").get<bool>()});
  }
  return t;
}

/// Threshold grid rows: (threshold, lhs, bound, violated).
inline std::string strassen_csv(const ExperimentResult& e) {
  std::string out = "threshold,lhs,bound,violated\n";
  for (const StrassenRow& row : e.strassen_grid) {
    out += fmt17(row.threshold);
    out += ',';
    out += fmt17(row.lhs);
    out += ',';
    out += fmt17(row.bound);
    out += ',';
    out += row.violated ? '1' : '0';
    out += '\n';
  }
  return out;
}

/// Paired draws: (rep, z, z_dagger).
inline std::string samples_csv(const ExperimentResult& e) {
  std::string out = "rep,z,z_dagger\n";
  for (std::uint64_t r = 0; r < e.reps; ++r) {
    out += std::to_string(r);
    out += ',';
    out += fmt17(e.z_samples[r]);
    out += ',';
    out += fmt17(e.z_dagger_samples[r]);
    out += '\n';
  }
  return out;
}

/// One-row summary of a bound report.
inline std::string bound_csv(const BoundReport& r) {
  std::string out =
      "epsilon,c_gamma,term1,term2,l_n,radius,prob_bound\n";
  out += fmt17(r.epsilon);
  out += ',';
  out += fmt17(r.c_gamma);
  out += ',';
  out += fmt17(r.term1);
  out += ',';
  out += fmt17(r.term2);
  out += ',';
  out += fmt17(r.l_n);
  out += ',';
  out += fmt17(r.radius);
  out += ',';
  out += fmt17(r.prob_bound);
  out += '\n';
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot open output file '" + path + "'");
  f << content;
  if (!f) throw DomainError("failed writing output file '" + path + "'");
}

/// Wraps a payload with the versioned envelope every report shares.
inline json report_envelope(const std::string& command, json payload) {
  return json{{"schema_version", kReportSchemaVersion}, {"command", command},
              {"result", std::move(payload)}};
}

}  // namespace io
}  // namespace maxgauss
