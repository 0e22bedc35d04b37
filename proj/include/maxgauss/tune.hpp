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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "maxgauss/bounds.hpp"
#include "maxgauss/errors.hpp"
#include "maxgauss/smoothing_params.hpp"

namespace maxgauss {

enum class TuneObjective {
  minimize_radius_given_budget,  // min c_gamma + 3 delta  s.t. prob bound <= budget
  minimize_bound_given_radius,   // min prob bound         s.t. radius <= radius_cap
};

struct TuneRequest {
  MomentProfile profile;
  std::size_t d = 0;
  TuneObjective objective = TuneObjective::minimize_radius_given_budget;
  double budget = 0.0;      // in (0,1) for the budget objective
  double radius_cap = 0.0;  // > 0 for the radius-cap objective
  std::size_t grid_points_per_axis = 64;
  std::size_t refine_iters = 160;
  double gamma_lo = 1e-2, gamma_hi = 1e3;
  double delta_lo = 1e-2, delta_hi = 1e3;

  void validate() const {
    profile.validate();
    if (d == 0) throw DomainError("TuneRequest: d must be >= 1");
    if (objective == TuneObjective::minimize_radius_given_budget &&
        !(budget > 0.0 && budget < 1.0))
      throw DomainError("TuneRequest: budget must lie in (0,1)");
    if (objective == TuneObjective::minimize_bound_given_radius && !(radius_cap > 0.0))
      throw DomainError("TuneRequest: radius_cap must be > 0");
    if (grid_points_per_axis < 16)
      throw DomainError("TuneRequest: grid_points_per_axis must be >= 16");
    if (refine_iters < 20) throw DomainError("TuneRequest: refine_iters must be >= 20");
    if (!(gamma_lo > 0.0 && gamma_lo < gamma_hi) || !(delta_lo > 0.0 && delta_lo < delta_hi))
      throw DomainError("TuneRequest: malformed search box");
    if (!(gamma_hi * delta_hi > 1.0))
      throw DomainError("TuneRequest: feasible cone gamma*delta > 1 does not meet the box");
  }
};

struct TracePoint {
  double gamma = 0.0;
  double delta = 0.0;
  double objective = 0.0;
  double constraint = 0.0;  // prob bound or radius, whichever is constrained
  bool feasible = false;
};

struct TuneResult {
  bool feasible = false;
  double gamma = 0.0;
  double delta = 0.0;
  BoundReport report;
  std::vector<TracePoint> trace;
  // When infeasible: the smallest constraint value seen on the grid and
  // where it was attained.
  double grid_min_constraint = std::numeric_limits<double>::infinity();
  double grid_min_gamma = 0.0;
  double grid_min_delta = 0.0;
};

/// Every objective/constraint evaluation flows through this hook, which
/// defaults to the bound calculator. Tests swap in a counting wrapper to
/// pin the single-source-of-truth property.
using BoundEvaluator =
    std::function<BoundReport(const SmoothingParams&, const MomentProfile&)>;

namespace detail {

struct TuneEval {
  double objective;
  double constraint;
  bool feasible;
  BoundReport report;
};

struct TuneContext {
  const TuneRequest& req;
  const BoundEvaluator& eval;
  std::vector<TracePoint>* trace;

  TuneEval at(double gamma, double delta) const {
    TuneEval e;
    if (!(gamma * delta > 1.0)) {
      e.objective = std::numeric_limits<double>::infinity();
      e.constraint = std::numeric_limits<double>::infinity();
      e.feasible = false;
      trace->push_back({gamma, delta, e.objective, e.constraint, false});
      return e;
    }
    SmoothingParams p{gamma, delta, req.profile.iota, req.d};
    try {
      e.report = eval(p, req.profile);
    } catch (const DomainError&) {
      // gamma*delta can land so close to 1 that epsilon rounds to 1;
      // such knife-edge points are unusable, not an optimizer failure
      e.objective = std::numeric_limits<double>::infinity();
      e.constraint = std::numeric_limits<double>::infinity();
      e.feasible = false;
      trace->push_back({gamma, delta, e.objective, e.constraint, false});
      return e;
    }
    if (req.objective == TuneObjective::minimize_radius_given_budget) {
      e.objective = e.report.radius;
      e.constraint = e.report.prob_bound;
      e.feasible = e.constraint <= req.budget;
    } else {
      e.objective = e.report.prob_bound_raw;
      e.constraint = e.report.radius;
      e.feasible = e.constraint <= req.radius_cap;
    }
    trace->push_back({gamma, delta, e.objective, e.constraint, e.feasible});
    return e;
  }
};

/// Tie rule: better objective wins; exact ties go to the smaller radius,
/// then the smaller gamma.
inline bool tune_better(double obj_a, double rad_a, double gam_a, double obj_b, double rad_b,
                        double gam_b) {
  if (obj_a != obj_b) return obj_a < obj_b;
  if (rad_a != rad_b) return rad_a < rad_b;
  return gam_a < gam_b;
}

}  // namespace detail

/// Grid scan in (log gamma, log delta) followed by coordinate-wise
/// golden-section refinement around the best feasible grid point.
/// Infeasible points evaluate to +inf, the returned point is the best
/// point ever evaluated, so the result is never worse than the grid.
inline TuneResult optimize(const TuneRequest& req, const BoundEvaluator& evaluator = {}) {
  req.validate();
  const BoundEvaluator eval =
      evaluator ? evaluator
                : BoundEvaluator([](const SmoothingParams& p, const MomentProfile& prof) {
                    return l_n(p, prof);
                  });

  TuneResult res;
  detail::TuneContext ctx{req, eval, &res.trace};

  const double lg_lo = std::log(req.gamma_lo), lg_hi = std::log(req.gamma_hi);
  const double ld_lo = std::log(req.delta_lo), ld_hi = std::log(req.delta_hi);
  const std::size_t g = req.grid_points_per_axis;

  bool have_best = false;
  double best_obj = std::numeric_limits<double>::infinity();
  double best_gamma = 0.0, best_delta = 0.0, best_radius = 0.0;
  BoundReport best_report;

  auto consider = [&](double gamma, double delta) -> detail::TuneEval {
    const detail::TuneEval e = ctx.at(gamma, delta);
    if (!e.feasible) {
      if (std::isfinite(e.constraint) && e.constraint < res.grid_min_constraint) {
        res.grid_min_constraint = e.constraint;
        res.grid_min_gamma = gamma;
        res.grid_min_delta = delta;
      }
      return e;
    }
    if (!have_best || detail::tune_better(e.objective, e.report.radius, gamma, best_obj,
                                          best_radius, best_gamma)) {
      have_best = true;
      best_obj = e.objective;
      best_gamma = gamma;
      best_delta = delta;
      best_radius = e.report.radius;
      best_report = e.report;
    }
    return e;
  };

  for (std::size_t a = 0; a < g; ++a) {
    const double lg = lg_lo + (lg_hi - lg_lo) * static_cast<double>(a) /
                                  static_cast<double>(g - 1);
    for (std::size_t b = 0; b < g; ++b) {
      const double ld = ld_lo + (ld_hi - ld_lo) * static_cast<double>(b) /
                                    static_cast<double>(g - 1);
      consider(std::exp(lg), std::exp(ld));
    }
  }

  // Refinement through the u = gamma*delta reduction. At fixed u the
  // probability bound is strictly decreasing in delta (epsilon depends
  // on u alone, both branches of L_n decay in delta) and the radius is
  // strictly increasing in delta, so each objective collapses to a 1-D
  // problem over u with the boundary delta found by bisection. The
  // feasible region pinches along u ~ const in (gamma, delta), which is
  // exactly why a 2-D local search around the grid keeps stalling.
  const bool budget_objective =
      req.objective == TuneObjective::minimize_radius_given_budget;
  const double lu_lo = std::log(std::max(req.gamma_lo * req.delta_lo, 1.0 + 1e-6));
  const double lu_hi = std::log(req.gamma_hi * req.delta_hi);

  // Returns the objective value attained at the boundary delta for this
  // u, or +inf when no feasible delta exists; every probe lands in the
  // trace and the global best via consider().
  auto reduced_objective = [&](double lu) {
    const double u = std::exp(lu);
    const double ld_min = std::max(ld_lo, lu - std::log(req.gamma_hi));
    const double ld_max = std::min(ld_hi, lu - std::log(req.gamma_lo));
    if (!(ld_min <= ld_max)) return std::numeric_limits<double>::infinity();
    auto probe = [&](double ld) { return consider(u / std::exp(ld), std::exp(ld)); };

    if (budget_objective) {
      // Constraint loosest at the largest admissible delta.
      detail::TuneEval top = probe(ld_max);
      if (!top.feasible) return std::numeric_limits<double>::infinity();
      double lo = ld_min, hi = ld_max;
      detail::TuneEval at_hi = top;
      for (int it = 0; it < 48 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const detail::TuneEval e = probe(mid);
        if (e.feasible) {
          hi = mid;
          at_hi = e;
        } else {
          lo = mid;
        }
      }
      return at_hi.objective;
    }

    // Radius cap: admissible deltas are bounded above by the cap line;
    // the bound is smallest at the largest one.
    const double denom = std::log(static_cast<double>(req.d)) / u + 3.0;
    const double ld_cap = std::log(req.radius_cap / denom);
    const double ld_eval = std::min(ld_max, ld_cap);
    if (!(ld_eval >= ld_min)) return std::numeric_limits<double>::infinity();
    const detail::TuneEval e = probe(ld_eval);
    return e.feasible ? e.objective : std::numeric_limits<double>::infinity();
  };

  // The reduced landscape can be multimodal (the two L_n branches trade
  // off against epsilon at different u), so scan densely and polish the
  // best few separated cells rather than one.
  const std::size_t u_points = std::max<std::size_t>(8 * req.grid_points_per_axis, 512);
  const double cell = (lu_hi - lu_lo) / static_cast<double>(u_points - 1);
  std::vector<double> scan(u_points);
  for (std::size_t k = 0; k < u_points; ++k) {
    const double lu = lu_lo + cell * static_cast<double>(k);
    scan[k] = reduced_objective(lu);
  }
  std::vector<std::size_t> cells(u_points);
  std::iota(cells.begin(), cells.end(), 0);
  std::sort(cells.begin(), cells.end(),
            [&](std::size_t a, std::size_t b) { return scan[a] < scan[b]; });
  std::vector<std::size_t> picks;
  for (std::size_t k : cells) {
    if (!std::isfinite(scan[k]) || picks.size() >= 5) break;
    bool adjacent = false;
    for (std::size_t p : picks) adjacent = adjacent || (k > p ? k - p : p - k) <= 4;
    if (!adjacent) picks.push_back(k);
  }

  const double phi = 0.61803398874989484820;
  const std::size_t polish = std::max<std::size_t>(req.refine_iters / 2, 20);
  for (std::size_t pick : picks) {
    const double center = lu_lo + cell * static_cast<double>(pick);
    double lo = std::max(lu_lo, center - 2.0 * cell);
    double hi = std::min(lu_hi, center + 2.0 * cell);
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = reduced_objective(x1);
    double f2 = reduced_objective(x2);
    for (std::size_t it = 0; it < polish; ++it) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - phi * (hi - lo);
        f1 = reduced_objective(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + phi * (hi - lo);
        f2 = reduced_objective(x2);
      }
    }
  }

  if (!have_best) {
    res.feasible = false;
    return res;
  }
  res.feasible = true;
  res.gamma = best_gamma;
  res.delta = best_delta;
  res.report = best_report;
  return res;
}

}  // namespace maxgauss
