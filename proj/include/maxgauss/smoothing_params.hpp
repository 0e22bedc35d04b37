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
#include <cstddef>
#include <string>

#include "maxgauss/errors.hpp"

namespace maxgauss {

/// Smoothing configuration shared by the smooth max, the smoothed
/// indicator and the bound calculator.
///
///   gamma  sharpness of the smooth max (units 1/x)
///   delta  half-width of the indicator smoothing (units of x)
///   iota   moment surplus exponent in [0,1]
///   d      ambient dimension
///
/// Validity requires gamma*delta > 1 strictly; under that constraint
/// epsilon() always lands in (0,1).
struct SmoothingParams {
  double gamma = 0.0;
  double delta = 0.0;
  double iota = 0.0;
  std::size_t d = 0;

  void validate() const {
    if (!std::isfinite(gamma) || gamma <= 0.0)
      throw DomainError("SmoothingParams: gamma must be finite and > 0");
    if (!std::isfinite(delta) || delta <= 0.0)
      throw DomainError("SmoothingParams: delta must be finite and > 0");
    if (!(gamma * delta > 1.0))
      throw DomainError("SmoothingParams: gamma*delta must exceed 1, got " +
                        std::to_string(gamma * delta));
    if (!std::isfinite(iota) || iota < 0.0 || iota > 1.0)
      throw DomainError("SmoothingParams: iota must lie in [0,1]");
    if (d == 0) throw DomainError("SmoothingParams: d must be >= 1");
  }

  /// gamma*delta * exp(-(gamma^2*delta^2 - 1)/2); strictly inside (0,1)
  /// whenever gamma*delta > 1. Within ~1e-9 of the boundary the true
  /// value rounds to 1.0 in double precision; such parameters are
  /// indistinguishable from invalid ones and are rejected.
  double epsilon() const {
    const double u = gamma * delta;
    const double e = u * std::exp(-(u * u - 1.0) / 2.0);
    if (!(e > 0.0 && e < 1.0))
      throw DomainError("SmoothingParams: epsilon must lie in (0,1); gamma*delta is "
                        "at or too close to 1");
    return e;
  }

  /// Worst-case overshoot of the smooth max: log(d)/gamma.
  double c_gamma() const { return std::log(static_cast<double>(d)) / gamma; }

  /// Transition span of the smoothed indicator.
  double transition_width() const { return 3.0 * delta; }
};

}  // namespace maxgauss
