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
#include <span>
#include <vector>

#include "maxgauss/errors.hpp"
#include "maxgauss/linalg.hpp"
#include "maxgauss/smooth_indicator.hpp"
#include "maxgauss/smoothing_params.hpp"

namespace maxgauss {

/// Gradient of the smooth max: a probability vector concentrating on
/// the maximal coordinates as gamma grows. Entries sum to 1 and are
/// invariant under adding a constant to every coordinate.
struct SoftmaxWeights {
  std::vector<double> pi;
};

namespace detail {

inline void check_input(const SmoothingParams& params, std::span<const double> x) {
  params.validate();
  if (x.size() != params.d) throw ShapeError("smooth max: x has wrong dimension");
  for (double v : x)
    if (!std::isfinite(v)) throw DomainError("smooth max: non-finite input");
}

/// Index of the first maximal coordinate. The tie rule does not change
/// any value; it is fixed so replays are bit-identical.
inline std::size_t first_argmax(std::span<const double> x) {
  std::size_t mi = 0;
  for (std::size_t j = 1; j < x.size(); ++j)
    if (x[j] > x[mi]) mi = j;
  return mi;
}

/// Shifted exponentials exp(gamma*(x_j - max x)) and their compensated
/// sum. The max term contributes exactly 1, so the sum is >= 1 and the
/// log-sum-exp never dips below the true max even in floating point.
inline double shifted_exponentials(const SmoothingParams& params, std::span<const double> x,
                                   std::vector<double>& e) {
  const std::size_t m = first_argmax(x);
  e.resize(x.size());
  KahanSum sum;
  for (std::size_t j = 0; j < x.size(); ++j) {
    e[j] = std::exp(params.gamma * (x[j] - x[m]));
    sum.add(e[j]);
  }
  return sum.value();
}

}  // namespace detail

/// Smooth max psi(x) = log(sum_j exp(gamma x_j))/gamma, evaluated
/// shift-stably. Satisfies max_j x_j <= psi(x) <= max_j x_j + log(d)/gamma.
inline double psi(const SmoothingParams& params, std::span<const double> x) {
  detail::check_input(params, x);
  const double m = x[detail::first_argmax(x)];
  std::vector<double> e;
  const double sum = detail::shifted_exponentials(params, x, e);
  return m + std::log(sum) / params.gamma;
}

inline SoftmaxWeights psi_grad(const SmoothingParams& params, std::span<const double> x) {
  detail::check_input(params, x);
  std::vector<double> e;
  const double sum = detail::shifted_exponentials(params, x, e);
  for (double& v : e) v /= sum;
  return SoftmaxWeights{std::move(e)};
}

/// Hessian of psi: gamma * (diag(pi) - pi pi^T). Symmetric, rows sum to
/// zero, positive semidefinite.
inline Matrix psi_hessian(const SmoothingParams& params, std::span<const double> x) {
  const SoftmaxWeights w = psi_grad(params, x);
  const std::size_t d = w.pi.size();
  Matrix h(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const double kron = j == k ? w.pi[j] : 0.0;
      h(j, k) = params.gamma * (kron - w.pi[j] * w.pi[k]);
    }
  }
  return h;
}

/// Dense materialization limit for the third derivative tensor.
inline constexpr std::size_t kDenseTensorLimit = 128;

/// Third derivative tensor of psi,
///   gamma^2 (d_jk d_jl pi_j - d_jk pi_j pi_l - d_jl pi_j pi_k
///            - d_kl pi_k pi_j + 2 pi_j pi_k pi_l),
/// fully symmetric; contracting any index against the all-ones vector
/// yields the zero matrix. Dense storage is only allowed up to d = 128.
inline Tensor3 psi_third(const SmoothingParams& params, std::span<const double> x) {
  if (params.d > kDenseTensorLimit)
    throw DomainError("psi_third: dense tensor materialization limited to d <= 128");
  const SoftmaxWeights w = psi_grad(params, x);
  const std::size_t d = w.pi.size();
  const double g2 = params.gamma * params.gamma;
  Tensor3 t(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j; k < d; ++k) {
      for (std::size_t l = k; l < d; ++l) {
        double v = 2.0 * w.pi[j] * w.pi[k] * w.pi[l];
        if (j == k && j == l) v += w.pi[j];
        if (j == k) v -= w.pi[j] * w.pi[l];
        if (j == l) v -= w.pi[j] * w.pi[k];
        if (k == l) v -= w.pi[k] * w.pi[j];
        v *= g2;
        // One evaluation mirrored over all six index orders keeps the
        // tensor symmetric bit-for-bit.
        t(j, k, l) = v;
        t(j, l, k) = v;
        t(k, j, l) = v;
        t(k, l, j) = v;
        t(l, j, k) = v;
        t(l, k, j) = v;
      }
    }
  }
  return t;
}

/// Scalar derivatives of g at psi(x), shared by the composite helpers.
struct CompositeDerivs {
  double psi_value = 0.0;
  double g0 = 0.0, g1 = 0.0, g2 = 0.0, g3 = 0.0;
};

inline CompositeDerivs composite_scalar_derivs(const SmoothingParams& params,
                                               const SmoothIndicator& g,
                                               std::span<const double> x) {
  CompositeDerivs c;
  c.psi_value = psi(params, x);
  c.g0 = g_eval(g, c.psi_value, 0);
  c.g1 = g_eval(g, c.psi_value, 1);
  c.g2 = g_eval(g, c.psi_value, 2);
  c.g3 = g_eval(g, c.psi_value, 3);
  return c;
}

/// f = g after psi; value, gradient and Hessian by the chain rule.
inline double composite_value(const SmoothingParams& params, const SmoothIndicator& g,
                              std::span<const double> x) {
  return g_eval(g, psi(params, x), 0);
}

inline std::vector<double> composite_grad(const SmoothingParams& params,
                                          const SmoothIndicator& g,
                                          std::span<const double> x) {
  const double gp = g_eval(g, psi(params, x), 1);
  SoftmaxWeights w = psi_grad(params, x);
  for (double& v : w.pi) v *= gp;
  return std::move(w.pi);
}

inline Matrix composite_hessian(const SmoothingParams& params, const SmoothIndicator& g,
                                std::span<const double> x) {
  const CompositeDerivs c = composite_scalar_derivs(params, g, x);
  const SoftmaxWeights w = psi_grad(params, x);
  const std::size_t d = w.pi.size();
  Matrix h(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const double kron = j == k ? w.pi[j] : 0.0;
      const double psi_jk = params.gamma * (kron - w.pi[j] * w.pi[k]);
      h(j, k) = c.g2 * w.pi[j] * w.pi[k] + c.g1 * psi_jk;
    }
  }
  return h;
}

enum class ThirdSumMethod {
  automatic,  // dense up to d = 128, factored beyond
  dense,
  factored,
};

namespace detail {

/// Entry-by-entry |.| sum over the dense composite third tensor, O(d^3).
inline double f_third_sum_dense(double gamma, const CompositeDerivs& c,
                                std::span<const double> pi) {
  const std::size_t d = pi.size();
  const double g2 = gamma * gamma;
  KahanSum total;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      const double h_jk = gamma * ((j == k ? pi[j] : 0.0) - pi[j] * pi[k]);
      for (std::size_t l = 0; l < d; ++l) {
        const double h_jl = gamma * ((j == l ? pi[j] : 0.0) - pi[j] * pi[l]);
        const double h_kl = gamma * ((k == l ? pi[k] : 0.0) - pi[k] * pi[l]);
        double t = 2.0 * pi[j] * pi[k] * pi[l];
        if (j == k && j == l) t += pi[j];
        if (j == k) t -= pi[j] * pi[l];
        if (j == l) t -= pi[j] * pi[k];
        if (k == l) t -= pi[k] * pi[j];
        t *= g2;
        const double entry = c.g3 * pi[j] * pi[k] * pi[l] +
                             c.g2 * (h_jk * pi[l] + h_jl * pi[k] + h_kl * pi[j]) +
                             c.g1 * t;
        total.add(std::abs(entry));
      }
    }
  }
  return total.value();
}

/// Same sum in O(d): the tensor only has three structural entry shapes.
/// With v_j = pi_j and u(v) = g3 v + gamma g2 (1 - 3v) + gamma^2 g1 (2v - 1):
///   diagonal (j=k=l):    g3 v^3 + 3 gamma g2 v^2 (1-v) + gamma^2 g1 v(1-v)(1-2v)
///   two equal (3 ways):  v_j v_l u(v_j)
///   all distinct:        v_j v_k v_l (g3 - 3 gamma g2 + 2 gamma^2 g1)
inline double f_third_sum_factored(double gamma, const CompositeDerivs& c,
                                   std::span<const double> pi) {
  const double g2sq = gamma * gamma;
  KahanSum diag, pair;
  double s2 = 0.0, s3 = 0.0;
  for (double v : pi) {
    s2 += v * v;
    s3 += v * v * v;
    const double one_m = 1.0 - v;
    diag.add(std::abs(c.g3 * v * v * v + 3.0 * gamma * c.g2 * v * v * one_m +
                      g2sq * c.g1 * v * one_m * (1.0 - 2.0 * v)));
    const double u = c.g3 * v + gamma * c.g2 * (1.0 - 3.0 * v) + g2sq * c.g1 * (2.0 * v - 1.0);
    pair.add(v * one_m * std::abs(u));
  }
  const double distinct_mass = std::max(0.0, 1.0 - 3.0 * s2 + 2.0 * s3);
  const double w = std::abs(c.g3 - 3.0 * gamma * c.g2 + 2.0 * g2sq * c.g1);
  return diag.value() + 3.0 * pair.value() + w * distinct_mass;
}

}  // namespace detail

/// Sum of absolute third derivatives of the composite f = g after psi,
/// sum_{j,k,l} |d_jkl f(x)|. Always bounded by
///   ||g'''|| + 6 gamma ||g''|| + 6 gamma^2 ||g'||.
inline double f_third_sum(const SmoothingParams& params, const SmoothIndicator& g,
                          std::span<const double> x,
                          ThirdSumMethod method = ThirdSumMethod::automatic) {
  detail::check_input(params, x);
  const CompositeDerivs c = composite_scalar_derivs(params, g, x);
  const SoftmaxWeights w = psi_grad(params, x);
  const bool dense = method == ThirdSumMethod::dense ||
                     (method == ThirdSumMethod::automatic && params.d <= kDenseTensorLimit);
  return dense ? detail::f_third_sum_dense(params.gamma, c, w.pi)
               : detail::f_third_sum_factored(params.gamma, c, w.pi);
}

/// Analytic envelope for f_third_sum built from the certified sup-norms of g.
inline double f_third_envelope(const SmoothingParams& params, const SmoothIndicator& g) {
  return g.sup_d3() + 6.0 * params.gamma * g.sup_d2() +
         6.0 * params.gamma * params.gamma * g.sup_d1();
}

}  // namespace maxgauss
