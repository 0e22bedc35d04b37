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
#include <numeric>
#include <vector>

#include "maxgauss/errors.hpp"

namespace maxgauss {

/// Gauss-Hermite rule rewritten for the standard normal weight:
/// sum_k weights[k] f(nodes[k]) approximates E f(Z), Z ~ N(0,1).
/// Nodes are exactly symmetric about zero (mirrored in pairs), so every
/// odd moment integrates to zero identically.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch: the N(0,1) orthogonal-polynomial recurrence has Jacobi
/// matrix diag 0 and off-diagonal sqrt(k). Implicit-shift QL finds its
/// eigenvalues (the nodes); the squared first eigenvector components are
/// the weights, tracked here as a single row vector under the rotations.
/// Stable at any order, unlike Newton polishing of recurrence values,
/// which starts skipping roots in the hundreds.
inline GaussHermiteRule gauss_hermite(std::size_t m) {
  if (m < 1) throw DomainError("gauss_hermite: order must be >= 1");

  std::vector<double> diag(m, 0.0);
  std::vector<double> off(m, 0.0);  // off[k] couples k and k+1
  std::vector<double> first_row(m, 0.0);
  for (std::size_t k = 0; k + 1 < m; ++k) off[k] = std::sqrt(static_cast<double>(k + 1));
  first_row[0] = 1.0;

  auto hypot2 = [](double a, double b) { return std::hypot(a, b); };

  for (std::size_t l = 0; l < m; ++l) {
    for (int iter = 0; iter < 64; ++iter) {
      std::size_t split = l;
      while (split + 1 < m) {
        const double scale = std::abs(diag[split]) + std::abs(diag[split + 1]);
        if (std::abs(off[split]) <= 1e-17 * scale + 1e-300) break;
        ++split;
      }
      if (split == l) break;

      // Wilkinson-style shift from the leading 2x2.
      double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
      double r = hypot2(g, 1.0);
      g = diag[split] - diag[l] + off[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
      double s = 1.0, c = 1.0, p = 0.0;
      for (std::size_t i = split; i-- > l;) {
        double f = s * off[i];
        const double b = c * off[i];
        r = hypot2(f, g);
        off[i + 1] = r;
        if (r == 0.0) {
          diag[i + 1] -= p;
          off[split] = 0.0;
          break;
        }
        s = f / r;
        c = g / r;
        g = diag[i + 1] - p;
        r = (diag[i] - g) * s + 2.0 * c * b;
        p = s * r;
        diag[i + 1] = g + p;
        g = c * r - b;
        // rotate the tracked eigenvector row
        f = first_row[i + 1];
        first_row[i + 1] = s * first_row[i] + c * f;
        first_row[i] = c * first_row[i] - s * f;
      }
      if (r == 0.0 && split - l > 1) continue;
      diag[l] -= p;
      off[l] = g;
      off[split] = 0.0;
    }
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });

  GaussHermiteRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    rule.nodes[k] = diag[order[k]];
    rule.weights[k] = first_row[order[k]] * first_row[order[k]];
  }

  // Enforce exact +- symmetry: mirror each pair, average the weights,
  // pin the middle node of an odd rule at zero, normalize to mass 1.
  for (std::size_t k = 0; k < m / 2; ++k) {
    const std::size_t j = m - 1 - k;
    const double node = 0.5 * (rule.nodes[j] - rule.nodes[k]);
    const double weight = 0.5 * (rule.weights[j] + rule.weights[k]);
    rule.nodes[k] = -node;
    rule.nodes[j] = node;
    rule.weights[k] = weight;
    rule.weights[j] = weight;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

}  // namespace maxgauss
