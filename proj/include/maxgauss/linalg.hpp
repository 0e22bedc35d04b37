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
#include <span>
#include <vector>

#include "maxgauss/errors.hpp"

namespace maxgauss {

/// Dense row-major matrix. Just enough linear algebra for covariance
/// factorizations and derivative tensors; deliberately not a BLAS.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  bool operator==(const Matrix&) const = default;
};

/// Dense order-3 tensor with all three extents equal to d.
struct Tensor3 {
  std::size_t d = 0;
  std::vector<double> a;

  explicit Tensor3(std::size_t dim = 0) : d(dim), a(dim * dim * dim, 0.0) {}

  double& operator()(std::size_t j, std::size_t k, std::size_t l) {
    return a[(j * d + k) * d + l];
  }
  double operator()(std::size_t j, std::size_t k, std::size_t l) const {
    return a[(j * d + k) * d + l];
  }
};

/// Lower Cholesky factor of a symmetric positive-definite matrix.
/// Throws DomainError if the matrix is not positive definite (within
/// a small diagonal tolerance).
inline Matrix cholesky_lower(const Matrix& s) {
  if (s.rows != s.cols) throw ShapeError("cholesky_lower: matrix must be square");
  const std::size_t n = s.rows;
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = s(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 1e-14 * (std::abs(s(j, j)) + 1.0)))
      throw DomainError("cholesky_lower: matrix is not positive definite");
    const double root = std::sqrt(diag);
    l(j, j) = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / root;
    }
  }
  return l;
}

inline void matvec(const Matrix& m, std::span<const double> x, std::span<double> out) {
  if (x.size() != m.cols || out.size() != m.rows)
    throw ShapeError("matvec: dimension mismatch");
  for (std::size_t i = 0; i < m.rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += m(i, j) * x[j];
    out[i] = acc;
  }
}

inline std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
  std::vector<double> out(m.rows);
  matvec(m, x, out);
  return out;
}

namespace detail {

/// Compensated accumulation; keeps long sums of nonnegative terms at a
/// few ulp instead of O(n) ulp.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace detail
}  // namespace maxgauss
