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

#include <array>
#include <cmath>
#include <cstdint>

#include "maxgauss/errors.hpp"

namespace maxgauss {

/// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).
///
/// Every (seed, domain, index) triple names an independent stream whose
/// values depend only on those coordinates, so replications can be
/// assigned to any number of workers and still reproduce bit-identical
/// results.
namespace philox {

inline constexpr std::uint32_t kM0 = 0xD2511F53u;
inline constexpr std::uint32_t kM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += kW0;
  key[1] += kW1;
}

inline std::array<std::uint32_t, 4> block(std::uint64_t seed,
                                          std::array<std::uint32_t, 4> ctr) {
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                      static_cast<std::uint32_t>(seed >> 32)};
  for (int r = 0; r < 10; ++r) round_once(ctr, key);
  return ctr;
}

}  // namespace philox

/// Stream domains keep logically distinct consumers of the same seed
/// statistically independent (ensemble draws, Gaussian analogues,
/// moment estimation, swap diagnostics).
enum class StreamDomain : std::uint32_t {
  experiment_x = 1,
  experiment_y = 2,
  moment_x = 3,
  moment_y = 4,
  lindeberg_x = 5,
  lindeberg_y = 6,
  generic = 7,
};

/// One Philox stream with buffered 64-bit output and the usual scalar
/// transforms. Each 128-bit block yields two uniforms; a Box-Muller
/// pair is carved from a single block.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index)
      : seed_(seed),
        stream_lo_(static_cast<std::uint32_t>(index)),
        stream_hi_(static_cast<std::uint32_t>(index >> 32) ^
                   (static_cast<std::uint32_t>(domain) << 24)) {}

  /// Uniform on the open interval (0,1).
  double next_uniform() { return to_unit(next_u64()); }

  /// Standard normal via a Box-Muller pair; consumes one block per two draws.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double next_rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

  /// Symmetric Pareto with tail index alpha: magnitude u^(-1/alpha) on
  /// [1, inf), random sign. Raw absolute moments are alpha/(alpha - q)
  /// for q < alpha and infinite beyond.
  double next_sym_pareto(double alpha) {
    const double sign = next_rademacher();
    const double u = next_uniform();
    return sign * std::pow(u, -1.0 / alpha);
  }

  /// Student t with dof degrees of freedom by the polar identity
  ///   t = cos(2 pi V) * sqrt(dof * (U^(-2/dof) - 1)),
  /// the radial inverse-CDF of the spherical bivariate t combined with
  /// a uniform angle; exact and a fixed two uniforms per draw.
  double next_student_t(double dof) {
    const double u = next_uniform();
    const double v = next_uniform();
    const double r2 = dof * (std::pow(u, -2.0 / dof) - 1.0);
    return std::sqrt(r2) * std::cos(6.283185307179586476925286766559 * v);
  }

 private:
  std::uint64_t next_u64() {
    if (phase_ == 0) {
      const auto out = philox::block(seed_, {static_cast<std::uint32_t>(block_),
                                             static_cast<std::uint32_t>(block_ >> 32),
                                             stream_lo_, stream_hi_});
      buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
      buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
      ++block_;
    }
    const std::uint64_t v = buffer_[phase_];
    phase_ ^= 1u;
    return v;
  }

  static double to_unit(std::uint64_t x) {
    // 53 significant bits, offset by half an ulp: never exactly 0 or 1.
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_ = {0, 0};
  unsigned phase_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace maxgauss
