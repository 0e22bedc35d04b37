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
#include <vector>

#include "maxgauss/borel_set.hpp"
#include "maxgauss/errors.hpp"
#include "maxgauss/smoothing_params.hpp"

namespace maxgauss {
namespace detail {

// Septic smoothstep S(u) = 35u^4 - 84u^5 + 70u^6 - 20u^7 on [0,1].
// S(0)=0, S(1)=1 and S', S'', S''' all vanish at both endpoints, so a
// transition glued between constant pieces is C^3; only the fourth
// derivative jumps at the junctions.
//
// Horner on the raw coefficients loses ~80 eps to cancellation as u
// approaches 1 (and can even round above 1). S'(u) is symmetric about
// 1/2, so S(u) = 1 - S(1-u); evaluating the upper half by reflection
// keeps the value inside [0,1] exactly.
inline double smoothstep_lower_half(double u) {
  return ((((-20.0 * u + 70.0) * u - 84.0) * u + 35.0) * u * u * u * u);
}

inline double smoothstep(double u) {
  if (u > 0.5) return 1.0 - smoothstep_lower_half(1.0 - u);
  return smoothstep_lower_half(u);
}

// S'(u) = 140 u^3 (1-u)^3
inline double smoothstep_d1(double u) {
  const double v = u * (1.0 - u);
  return 140.0 * v * v * v;
}

// S''(u) = 420 u^2 (1-u)^2 (1-2u)
inline double smoothstep_d2(double u) {
  const double v = u * (1.0 - u);
  return 420.0 * v * v * (1.0 - 2.0 * u);
}

// S'''(u) = 840 u(1-u) (1 - 5u(1-u))
inline double smoothstep_d3(double u) {
  const double v = u * (1.0 - u);
  return 840.0 * v * (1.0 - 5.0 * v);
}

// Extrema of |S'|, |S''|, |S'''| on [0,1]:
//   |S'|   peaks at u = 1/2               -> 35/16
//   |S''|  peaks at u = (5 -+ sqrt 5)/10  -> 84/(5 sqrt 5)
//   |S'''| peaks at u = 1/2               -> 105/2
inline constexpr double kMaxS1 = 35.0 / 16.0;
inline const double kMaxS2 = 84.0 / (5.0 * std::sqrt(5.0));
inline constexpr double kMaxS3 = 105.0 / 2.0;

}  // namespace detail

/// Pass/fail record produced by certify_bounds.
struct CertificationReport {
  bool pass = false;
  long grid_points_per_zone = 0;
  // Dense-grid maxima of |g'|, |g''|, |g'''|.
  double max_abs_d1 = 0.0;
  double max_abs_d2 = 0.0;
  double max_abs_d3 = 0.0;
  // Scaled ratios: max|g'| delta, max|g''| delta/gamma, max|g'''| delta/gamma^2.
  double d1_ratio = 0.0;
  double d2_ratio = 0.0;
  double d3_ratio = 0.0;
  long sandwich_violations = 0;
  long range_violations = 0;
};

/// Smooth surrogate for the indicator of a Borel set A:
///
///   g == 1 on A, g == 0 outside the 3*delta enlargement of A, and in
///   between g follows a septic smoothstep of span exactly 3*delta.
///
/// Certified sup-norms: |g'| <= 1/delta with room to spare, and both
/// |g''| delta/gamma and |g'''| delta/gamma^2 stay below big_c(), which
/// never exceeds 2 when gamma*delta > 1.
class SmoothIndicator {
 public:
  struct Piece {
    enum class Kind { rise, fall };
    Kind kind;
    double x0;  // transition start (value 0 for rise, 1 for fall)
    double x1;  // transition end
  };

  SmoothIndicator() = default;

  const BorelSet& base_set() const { return base_; }
  const BorelSet& enlarged_set() const { return enlarged_; }
  const BorelSet& plateaus() const { return plateaus_; }
  double width() const { return width_; }
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  double sup_d1() const { return sup_d1_; }
  double sup_d2() const { return sup_d2_; }
  double sup_d3() const { return sup_d3_; }
  double big_c() const { return big_c_; }
  /// Points where the fourth derivative jumps (transition endpoints);
  /// finite-difference probes of g''' should stay clear of these.
  const std::vector<double>& kink_points() const { return kinks_; }
  const std::vector<Piece>& transitions() const { return pieces_; }

  friend SmoothIndicator build_g(const BorelSet&, const SmoothingParams&, double);

 private:
  BorelSet base_;
  BorelSet enlarged_;
  BorelSet plateaus_;
  double width_ = 0.0;
  double gamma_ = 0.0;
  double delta_ = 0.0;
  double sup_d1_ = 0.0;
  double sup_d2_ = 0.0;
  double sup_d3_ = 0.0;
  double big_c_ = 0.0;
  std::vector<Piece> pieces_;
  std::vector<double> kinks_;
};

/// Builds the smoothed indicator for `a`. The transition width defaults
/// to 3*delta; passing anything else is a testing hook for producing a
/// deliberately out-of-contract surrogate.
inline SmoothIndicator build_g(const BorelSet& a, const SmoothingParams& params,
                               double transition_width = -1.0) {
  params.validate();
  const double w = transition_width > 0.0 ? transition_width : params.transition_width();

  SmoothIndicator g;
  g.base_ = a;
  g.width_ = w;
  g.gamma_ = params.gamma;
  g.delta_ = params.delta;
  g.enlarged_ = a.empty() ? a : enlarge(a, params.transition_width());

  if (a.empty()) return g;  // the zero function

  // Merge plateaus across gaps narrower than twice the transition width;
  // every point of such a gap lies within 3*delta of A, so g == 1 there
  // keeps the sandwich intact.
  std::vector<Interval> plateaus;
  plateaus.push_back(a.intervals().front());
  for (std::size_t k = 1; k < a.intervals().size(); ++k) {
    const Interval& iv = a.intervals()[k];
    if (iv.lo - plateaus.back().hi < 2.0 * w) {
      plateaus.back().hi = iv.hi;
    } else {
      plateaus.push_back(iv);
    }
  }
  g.plateaus_ = BorelSet(plateaus);

  for (const Interval& p : plateaus) {
    if (std::isfinite(p.lo)) {
      g.pieces_.push_back({SmoothIndicator::Piece::Kind::rise, p.lo - w, p.lo});
      g.kinks_.push_back(p.lo - w);
      g.kinks_.push_back(p.lo);
    }
    if (std::isfinite(p.hi)) {
      g.pieces_.push_back({SmoothIndicator::Piece::Kind::fall, p.hi, p.hi + w});
      g.kinks_.push_back(p.hi);
      g.kinks_.push_back(p.hi + w);
    }
  }
  std::sort(g.pieces_.begin(), g.pieces_.end(),
            [](const auto& u, const auto& v) { return u.x0 < v.x0; });
  std::sort(g.kinks_.begin(), g.kinks_.end());

  if (!g.pieces_.empty()) {
    g.sup_d1_ = detail::kMaxS1 / w;
    g.sup_d2_ = detail::kMaxS2 / (w * w);
    g.sup_d3_ = detail::kMaxS3 / (w * w * w);
    g.big_c_ = std::max(g.sup_d2_ * params.delta / params.gamma,
                        g.sup_d3_ * params.delta / (params.gamma * params.gamma));
  }
  return g;
}

/// Value of the order-th derivative of g at t, order in {0,1,2,3}.
inline double g_eval(const SmoothIndicator& g, double t, int order) {
  if (order < 0 || order > 3) throw DomainError("g_eval: order must be in {0,1,2,3}");
  if (std::isnan(t)) throw DomainError("g_eval: t is NaN");
  if (g.plateaus().contains(t)) return order == 0 ? 1.0 : 0.0;

  const auto& pieces = g.transitions();
  auto it = std::upper_bound(pieces.begin(), pieces.end(), t,
                             [](double v, const auto& p) { return v < p.x0; });
  if (it != pieces.begin()) {
    --it;
    if (t >= it->x0 && t <= it->x1) {
      const double w = g.width();
      const double u = (t - it->x0) / w;
      const double sign = it->kind == SmoothIndicator::Piece::Kind::rise ? 1.0 : -1.0;
      switch (order) {
        case 0: {
          const double s = detail::smoothstep(u);
          return it->kind == SmoothIndicator::Piece::Kind::rise ? s : 1.0 - s;
        }
        case 1: return sign * detail::smoothstep_d1(u) / w;
        case 2: return sign * detail::smoothstep_d2(u) / (w * w);
        default: return sign * detail::smoothstep_d3(u) / (w * w * w);
      }
    }
  }
  return 0.0;
}

/// Dense-grid certification of the derivative bounds and the pointwise
/// sandwich 1_A <= g <= 1_{A^{3 delta}}. Never throws; the report says
/// pass or fail.
inline CertificationReport certify_bounds(const SmoothIndicator& g, long grid_points_per_zone) {
  CertificationReport rep;
  rep.grid_points_per_zone = grid_points_per_zone;
  if (grid_points_per_zone < 1000) {
    rep.pass = false;
    return rep;  // too coarse to certify anything
  }

  const double gamma = g.gamma();
  const double delta = g.delta();
  // Comparisons carry a tiny headroom so a grid node that lands exactly
  // on an analytic extremum cannot fail on the last ulp.
  const double slack = 1.0 + 1e-9;

  auto check_point = [&](double t) {
    const double v = g_eval(g, t, 0);
    if (v < -1e-15 || v > 1.0 + 1e-15) ++rep.range_violations;
    if (g.base_set().contains(t) && v < 1.0) ++rep.sandwich_violations;
    if (!g.enlarged_set().contains(t) && v != 0.0) ++rep.sandwich_violations;
    rep.max_abs_d1 = std::max(rep.max_abs_d1, std::abs(g_eval(g, t, 1)));
    rep.max_abs_d2 = std::max(rep.max_abs_d2, std::abs(g_eval(g, t, 2)));
    rep.max_abs_d3 = std::max(rep.max_abs_d3, std::abs(g_eval(g, t, 3)));
  };

  for (const auto& p : g.transitions()) {
    for (long k = 0; k <= grid_points_per_zone; ++k) {
      const double u = static_cast<double>(k) / static_cast<double>(grid_points_per_zone);
      check_point(p.x0 + u * (p.x1 - p.x0));
    }
  }
  // Probe plateau interiors and the outside as well.
  for (const Interval& iv : g.plateaus().intervals()) {
    double lo = iv.lo;
    double hi = iv.hi;
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      lo = -1.0;
      hi = 1.0;
    } else if (!std::isfinite(lo)) {
      lo = hi - 1.0;
    } else if (!std::isfinite(hi)) {
      hi = lo + 1.0;
    }
    check_point((lo + hi) / 2.0);
    check_point(lo - 2.0 * g.width() - 1.0);
    check_point(hi + 2.0 * g.width() + 1.0);
  }

  rep.d1_ratio = rep.max_abs_d1 * delta;
  rep.d2_ratio = rep.max_abs_d2 * delta / gamma;
  rep.d3_ratio = rep.max_abs_d3 * delta / (gamma * gamma);
  rep.pass = rep.sandwich_violations == 0 && rep.range_violations == 0 &&
             rep.d1_ratio <= slack &&
             rep.d2_ratio <= g.big_c() * slack + 1e-300 &&
             rep.d3_ratio <= g.big_c() * slack + 1e-300;
  return rep;
}

}  // namespace maxgauss
