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
#include <cstdint>
#include <vector>

#include "maxgauss/distribution.hpp"
#include "maxgauss/errors.hpp"
#include "maxgauss/smoothing_params.hpp"

namespace maxgauss {

enum class MomentSource { analytic, monte_carlo };

/// The moment functionals entering the comparison bound:
///   third_max_x  E max_j sum_i |X_ij|^3        (and the Y analogue)
///   c_sum        sum_i E(max_j |X_ij|^{2+iota} + max_j |Y_ij|^{2+iota})
/// Analytic values carry zero standard error; Monte Carlo estimates
/// carry the usual sd/sqrt(reps).
struct MomentProfile {
  double third_max_x = 0.0;
  double third_max_x_se = 0.0;
  double third_max_y = 0.0;
  double third_max_y_se = 0.0;
  double c_sum = 0.0;
  double c_sum_se = 0.0;
  std::size_t n = 0;
  std::size_t d = 0;
  double iota = 0.0;
  MomentSource source = MomentSource::monte_carlo;
  std::uint64_t mc_reps = 0;
  std::uint64_t mc_seed = 0;

  void validate() const {
    if (n == 0 || d == 0) throw DomainError("MomentProfile: n and d must be >= 1");
    if (!(iota >= 0.0 && iota <= 1.0)) throw DomainError("MomentProfile: iota in [0,1]");
    auto nonneg = [](double v) { return v >= 0.0 || std::isinf(v); };
    if (!nonneg(third_max_x) || !nonneg(third_max_y) || !nonneg(c_sum))
      throw DomainError("MomentProfile: moment estimates must be >= 0");
    if (third_max_x_se < 0.0 || third_max_y_se < 0.0 || c_sum_se < 0.0)
      throw DomainError("MomentProfile: standard errors must be >= 0");
    if (source == MomentSource::analytic &&
        (third_max_x_se != 0.0 || third_max_y_se != 0.0 || c_sum_se != 0.0))
      throw DomainError("MomentProfile: analytic source implies zero standard errors");
  }
};

/// Everything the comparison theorem reports for one (gamma, delta):
/// both branches of the L_n minimum, the coupling radius and the
/// probability bound (epsilon + L_n)/(1 - epsilon), clipped into [0,1].
/// The bound is stated up to a universal constant that the analysis
/// never pins down; prob_bound carries the unscaled expression.
struct BoundReport {
  double epsilon = 0.0;
  double c_gamma = 0.0;
  double term1 = 0.0;     // gamma^2/delta * (third_max_x + third_max_y)
  double term1_se = 0.0;
  double term2 = 0.0;     // gamma^{(4+2 iota)/3} delta^{-(2+iota)/3} * c_sum
  double term2_se = 0.0;
  double l_n = 0.0;       // min(term1, term2)
  double l_n_se = 0.0;    // standard error of the selected branch
  double radius = 0.0;    // c_gamma + 3 delta, never clipped
  double prob_bound = 0.0;
  double prob_bound_raw = 0.0;  // before clipping at 1
  bool clipped = false;
};

/// epsilon(gamma, delta) = gamma delta exp(-(gamma^2 delta^2 - 1)/2).
/// Strictly decreasing in gamma*delta on (1, inf).
inline double epsilon_of(const SmoothingParams& params) {
  params.validate();
  return params.epsilon();
}

struct Lemma3Bound {
  double lhs = 0.0;  // min(a + x + x^2, x^3)
  double rhs = 0.0;  // 3 a^{(1-iota)/3} x^{2+iota}
};

/// Truncation inequality min(a+x+x^2, x^3) <= 3 a^{(1-iota)/3} x^{2+iota},
/// valid for a >= 1, x >= 0, iota in [0,1].
inline Lemma3Bound lemma3_bound(double a, double x, double iota) {
  if (!(a >= 1.0) || !std::isfinite(a)) throw DomainError("lemma3_bound: a must be >= 1");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("lemma3_bound: x must be >= 0");
  if (!(iota >= 0.0 && iota <= 1.0)) throw DomainError("lemma3_bound: iota in [0,1]");
  Lemma3Bound b;
  b.lhs = std::min(a + x + x * x, x * x * x);
  b.rhs = 3.0 * std::pow(a, (1.0 - iota) / 3.0) * std::pow(x, 2.0 + iota);
  return b;
}

namespace detail {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_and_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace detail

/// Moment functionals for the bound. Monte Carlo works for every spec;
/// the analytic path is only available for d = 1, where the max over
/// coordinates disappears and the listed families have closed-form
/// absolute moments. Requesting analytic anywhere else is an error.
inline MomentProfile moment_profile(const DistributionSpec& spec, double iota,
                                    std::uint64_t reps, std::uint64_t seed,
                                    MomentSource source = MomentSource::monte_carlo) {
  spec.validate();
  if (!(iota >= 0.0 && iota <= 1.0)) throw DomainError("moment_profile: iota in [0,1]");

  MomentProfile p;
  p.n = spec.n;
  p.d = spec.d;
  p.iota = iota;
  p.source = source;

  if (source == MomentSource::analytic) {
    if (spec.d != 1)
      throw DomainError("moment_profile: analytic closed forms exist only for d = 1 "
                        "(max-over-coordinates functionals need Monte Carlo)");
    const double q = 2.0 + iota;
    const double sigma_y = std::sqrt(spec.coordinate_variance());
    const double gauss_abs3 = 2.0 * std::sqrt(2.0 / 3.14159265358979323846);
    const double gauss_absq = std::pow(2.0, q / 2.0) * std::tgamma((q + 1.0) / 2.0) /
                              std::sqrt(3.14159265358979323846);
    const double nn = static_cast<double>(spec.n);
    p.third_max_x = nn * spec.coordinate_abs_moment(3.0);
    p.third_max_y = nn * sigma_y * sigma_y * sigma_y * gauss_abs3;
    p.c_sum = nn * (spec.coordinate_abs_moment(q) + std::pow(sigma_y, q) * gauss_absq);
    return p;
  }

  if (reps < 100) throw DomainError("moment_profile: monte_carlo requires reps >= 100");
  p.mc_reps = reps;
  p.mc_seed = seed;

  EnsembleSampler sampler(spec, seed);
  const double q = 2.0 + iota;
  std::vector<double> ax(reps), ay(reps), cs(reps);
  Matrix xs(spec.n, spec.d), ys(spec.n, spec.d);
  std::vector<double> colsum(spec.d);
  for (std::uint64_t r = 0; r < reps; ++r) {
    sampler.sample_x_rep(r, xs, StreamDomain::moment_x);
    sampler.sample_y_rep(r, ys, StreamDomain::moment_y);
    double c = 0.0;

    std::fill(colsum.begin(), colsum.end(), 0.0);
    for (std::size_t i = 0; i < spec.n; ++i) {
      double mx = 0.0;
      for (std::size_t j = 0; j < spec.d; ++j) {
        const double v = std::abs(xs(i, j));
        colsum[j] += v * v * v;
        mx = std::max(mx, v);
      }
      c += std::pow(mx, q);
    }
    ax[r] = *std::max_element(colsum.begin(), colsum.end());

    std::fill(colsum.begin(), colsum.end(), 0.0);
    for (std::size_t i = 0; i < spec.n; ++i) {
      double my = 0.0;
      for (std::size_t j = 0; j < spec.d; ++j) {
        const double v = std::abs(ys(i, j));
        colsum[j] += v * v * v;
        my = std::max(my, v);
      }
      c += std::pow(my, q);
    }
    ay[r] = *std::max_element(colsum.begin(), colsum.end());
    cs[r] = c;
  }
  const auto mx = detail::mean_and_se(ax);
  const auto my = detail::mean_and_se(ay);
  const auto mc = detail::mean_and_se(cs);
  p.third_max_x = mx.mean;
  p.third_max_x_se = mx.se;
  p.third_max_y = my.mean;
  p.third_max_y_se = my.se;
  p.c_sum = mc.mean;
  p.c_sum_se = mc.se;
  return p;
}

/// Assembles the full bound report. Standard errors propagate by
/// first-order arithmetic (the prefactors are deterministic).
inline BoundReport l_n(const SmoothingParams& params, const MomentProfile& profile) {
  params.validate();
  profile.validate();
  if (profile.iota != params.iota)
    throw DomainError("l_n: profile.iota must match params.iota");

  BoundReport r;
  r.epsilon = params.epsilon();
  r.c_gamma = params.c_gamma();
  r.radius = r.c_gamma + 3.0 * params.delta;

  const double f1 = params.gamma * params.gamma / params.delta;
  r.term1 = f1 * (profile.third_max_x + profile.third_max_y);
  r.term1_se = f1 * std::sqrt(profile.third_max_x_se * profile.third_max_x_se +
                              profile.third_max_y_se * profile.third_max_y_se);

  const double f2 = std::pow(params.gamma, (4.0 + 2.0 * params.iota) / 3.0) *
                    std::pow(params.delta, -(2.0 + params.iota) / 3.0);
  r.term2 = f2 * profile.c_sum;
  r.term2_se = f2 * profile.c_sum_se;

  if (r.term1 <= r.term2) {
    r.l_n = r.term1;
    r.l_n_se = r.term1_se;
  } else {
    r.l_n = r.term2;
    r.l_n_se = r.term2_se;
  }

  r.prob_bound_raw = (r.epsilon + r.l_n) / (1.0 - r.epsilon);
  r.clipped = r.prob_bound_raw > 1.0;
  r.prob_bound = std::min(1.0, r.prob_bound_raw);
  return r;
}

}  // namespace maxgauss
