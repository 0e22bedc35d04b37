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
#include <limits>
#include <string>
#include <vector>

#include "maxgauss/errors.hpp"
#include "maxgauss/linalg.hpp"
#include "maxgauss/rng.hpp"

namespace maxgauss {

enum class Family { gaussian, rademacher, student_t, sym_pareto };
enum class CovarianceModel { identity, equicorr, ar1 };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::rademacher: return "rademacher";
    case Family::student_t: return "student_t";
    default: return "sym_pareto";
  }
}

inline std::string covariance_name(CovarianceModel c) {
  switch (c) {
    case CovarianceModel::identity: return "identity";
    case CovarianceModel::equicorr: return "equicorr";
    default: return "ar1";
  }
}

/// Generative model for the ensemble X_1..X_n: i.i.d. driver coordinates
/// from `family`, scaled to unit variance when `standardized`, then mixed
/// linearly so that E(X_i X_i^T) equals the configured covariance. Linear
/// mixing preserves the moment order of the tails, which is the whole
/// point of the heavy-tailed families.
struct DistributionSpec {
  Family family = Family::gaussian;
  double tail_param = 0.0;  // dof for student_t, alpha for sym_pareto
  CovarianceModel covariance = CovarianceModel::identity;
  double rho = 0.0;
  std::size_t n = 1;
  std::size_t d = 1;
  bool standardized = true;

  void validate() const {
    if (n == 0 || d == 0) throw DomainError("DistributionSpec: n and d must be >= 1");
    if (family == Family::student_t && !(tail_param > 2.0))
      throw DomainError("DistributionSpec: student_t requires dof > 2");
    if (family == Family::sym_pareto && !(tail_param > 2.0))
      throw DomainError("DistributionSpec: sym_pareto requires alpha > 2");
    switch (covariance) {
      case CovarianceModel::identity:
        break;
      case CovarianceModel::equicorr:
        if (!(rho >= 0.0 && rho < 1.0))
          throw DomainError("DistributionSpec: equicorr requires rho in [0,1)");
        break;
      case CovarianceModel::ar1:
        if (!(rho > -1.0 && rho < 1.0))
          throw DomainError("DistributionSpec: ar1 requires rho in (-1,1)");
        break;
    }
  }

  /// Natural variance of one driver coordinate before standardization.
  double family_variance() const {
    switch (family) {
      case Family::gaussian:
      case Family::rademacher:
        return 1.0;
      case Family::student_t:
        return tail_param / (tail_param - 2.0);
      default:
        return tail_param / (tail_param - 2.0);
    }
  }

  /// Variance of one X coordinate after the standardization choice.
  double coordinate_variance() const { return standardized ? 1.0 : family_variance(); }

  /// Highest q with E|X|^q finite (exclusive for the heavy families).
  double finite_moment_order() const {
    switch (family) {
      case Family::gaussian:
      case Family::rademacher:
        return std::numeric_limits<double>::infinity();
      default:
        return tail_param;
    }
  }

  /// E|X_{ij}|^q of one coordinate of X, exact closed forms:
  ///   rademacher        1
  ///   gaussian          sigma^q 2^{q/2} Gamma((q+1)/2) / sqrt(pi)
  ///   sym_pareto(alpha) alpha/(alpha-q) for q < alpha (raw), +inf beyond
  ///   student_t(dof)    dof^{q/2} Gamma((q+1)/2) Gamma((dof-q)/2)
  ///                       / (sqrt(pi) Gamma(dof/2)) for q < dof
  /// Standardization divides the raw value by family_variance()^{q/2}.
  double coordinate_abs_moment(double q) const {
    if (q < 0.0) throw DomainError("coordinate_abs_moment: q must be >= 0");
    double raw;
    switch (family) {
      case Family::rademacher:
        raw = 1.0;
        break;
      case Family::gaussian:
        raw = std::pow(2.0, q / 2.0) * std::tgamma((q + 1.0) / 2.0) /
              std::sqrt(3.14159265358979323846);
        break;
      case Family::sym_pareto:
        if (q >= tail_param) return std::numeric_limits<double>::infinity();
        raw = tail_param / (tail_param - q);
        break;
      default:  // student_t
        if (q >= tail_param) return std::numeric_limits<double>::infinity();
        raw = std::pow(tail_param, q / 2.0) *
              std::exp(std::lgamma((q + 1.0) / 2.0) + std::lgamma((tail_param - q) / 2.0) -
                       std::lgamma(tail_param / 2.0)) /
              std::sqrt(3.14159265358979323846);
        break;
    }
    if (!standardized || family == Family::gaussian || family == Family::rademacher) return raw;
    return raw / std::pow(family_variance(), q / 2.0);
  }

  /// The target covariance: coordinate variance times the correlation model.
  Matrix covariance_matrix() const {
    validate();
    const double v = coordinate_variance();
    Matrix s(d, d);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        double c;
        switch (covariance) {
          case CovarianceModel::identity: c = j == k ? 1.0 : 0.0; break;
          case CovarianceModel::equicorr: c = j == k ? 1.0 : rho; break;
          default: c = std::pow(rho, std::abs(static_cast<double>(j) -
                                              static_cast<double>(k))); break;
        }
        s(j, k) = v * c;
      }
    }
    return s;
  }
};

/// reps x n x d sample array, row-major with rep slowest.
struct SampleArray {
  std::uint64_t reps = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> data;

  double& at(std::uint64_t rep, std::size_t i, std::size_t j) {
    return data[(rep * n + i) * d + j];
  }
  double at(std::uint64_t rep, std::size_t i, std::size_t j) const {
    return data[(rep * n + i) * d + j];
  }
};

/// Streams one replication at a time; the factorization of the target
/// covariance happens once up front. All draws for replication r come
/// from the (seed, domain, r) stream, independent of worker layout.
class EnsembleSampler {
 public:
  EnsembleSampler(const DistributionSpec& spec, std::uint64_t seed)
      : spec_(spec), seed_(seed), mix_(cholesky_lower(spec.covariance_matrix())) {
    spec_.validate();
    // Drivers are always generated at unit variance; the factor of the
    // target covariance carries the scale.
    driver_scale_ = 1.0 / std::sqrt(spec_.family_variance());
  }

  const DistributionSpec& spec() const { return spec_; }
  const Matrix& mixing_factor() const { return mix_; }

  /// One replication of X_1..X_n into out (n x d).
  void sample_x_rep(std::uint64_t rep, Matrix& out) const {
    RandomStream rs(seed_, StreamDomain::experiment_x, rep);
    fill_rep(rs, /*gaussian_analogue=*/false, out);
  }

  /// One replication of the Gaussian analogue Y_1..Y_n ~ N(0, Sigma).
  void sample_y_rep(std::uint64_t rep, Matrix& out) const {
    RandomStream rs(seed_, StreamDomain::experiment_y, rep);
    fill_rep(rs, /*gaussian_analogue=*/true, out);
  }

  /// Same, but on a caller-chosen stream domain (moment estimation and
  /// swap diagnostics keep their own domains).
  void sample_x_rep(std::uint64_t rep, Matrix& out, StreamDomain domain) const {
    RandomStream rs(seed_, domain, rep);
    fill_rep(rs, false, out);
  }
  void sample_y_rep(std::uint64_t rep, Matrix& out, StreamDomain domain) const {
    RandomStream rs(seed_, domain, rep);
    fill_rep(rs, true, out);
  }

 private:
  void fill_rep(RandomStream& rs, bool gaussian_analogue, Matrix& out) const {
    const std::size_t n = spec_.n;
    const std::size_t d = spec_.d;
    if (out.rows != n || out.cols != d) out = Matrix(n, d);
    std::vector<double> driver(d);
    std::vector<double> mixed(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double v;
        if (gaussian_analogue) {
          v = rs.next_normal();
        } else {
          switch (spec_.family) {
            case Family::gaussian: v = rs.next_normal(); break;
            case Family::rademacher: v = rs.next_rademacher(); break;
            case Family::student_t:
              v = rs.next_student_t(spec_.tail_param) * driver_scale_;
              break;
            default:
              v = rs.next_sym_pareto(spec_.tail_param) * driver_scale_;
              break;
          }
        }
        driver[j] = v;
      }
      matvec(mix_, driver, mixed);
      for (std::size_t j = 0; j < d; ++j) out(i, j) = mixed[j];
    }
  }

  DistributionSpec spec_;
  std::uint64_t seed_;
  Matrix mix_;
  double driver_scale_ = 1.0;
};

/// Full reps x n x d ensemble of X draws. Deterministic in (spec, reps, seed).
inline SampleArray sample_x(const DistributionSpec& spec, std::uint64_t reps,
                            std::uint64_t seed) {
  EnsembleSampler sampler(spec, seed);
  SampleArray arr{reps, spec.n, spec.d,
                  std::vector<double>(reps * spec.n * spec.d)};
  Matrix rep(spec.n, spec.d);
  for (std::uint64_t r = 0; r < reps; ++r) {
    sampler.sample_x_rep(r, rep);
    for (std::size_t i = 0; i < spec.n; ++i)
      for (std::size_t j = 0; j < spec.d; ++j) arr.at(r, i, j) = rep(i, j);
  }
  return arr;
}

/// Full reps x n x d ensemble of the Gaussian analogue.
inline SampleArray gaussian_analogue(const DistributionSpec& spec, std::uint64_t reps,
                                     std::uint64_t seed) {
  EnsembleSampler sampler(spec, seed);
  SampleArray arr{reps, spec.n, spec.d,
                  std::vector<double>(reps * spec.n * spec.d)};
  Matrix rep(spec.n, spec.d);
  for (std::uint64_t r = 0; r < reps; ++r) {
    sampler.sample_y_rep(r, rep);
    for (std::size_t i = 0; i < spec.n; ++i)
      for (std::size_t j = 0; j < spec.d; ++j) arr.at(r, i, j) = rep(i, j);
  }
  return arr;
}

}  // namespace maxgauss
