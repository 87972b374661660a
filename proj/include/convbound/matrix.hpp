/*
 * Copyright 2026 The convbound authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CONVBOUND_MATRIX_HPP
#define CONVBOUND_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "convbound/rng.hpp"

namespace convbound {

/// Dense real matrix, row-major storage, value semantics.
class Matrix {
 public:
  Matrix() = default;

  /// Zero matrix. rows and cols must be positive.
  Matrix(std::size_t rows, std::size_t cols);

  /// From row-major entries; entry count must equal rows*cols and every
  /// entry must be finite.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double operator()(std::size_t row, std::size_t col) const {
    return data_[row * cols_ + col];
  }
  double& operator()(std::size_t row, std::size_t col) {
    return data_[row * cols_ + col];
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool all_finite() const;

  Matrix& operator*=(double scalar);
  Matrix& operator+=(const Matrix& other);
  friend Matrix operator*(double scalar, Matrix m) { return m *= scalar; }
  friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// y = m * x
std::vector<double> matvec(const Matrix& m, std::span<const double> x);

/// y = m^T * x
std::vector<double> matvec_transposed(const Matrix& m,
                                      std::span<const double> x);

double vector_norm(std::span<const double> v);

/// sqrt of the sum of squared entries.
double frobenius_norm(const Matrix& m);

inline constexpr double kDefaultSpectralTol = 1e-10;
inline constexpr std::size_t kPowerIterationCap = 10000;
inline constexpr std::size_t kSvdFallbackDim = 2000;

/// Largest singular value, relative error <= tol.
///
/// Power iteration on m^T m from a fixed hashed start vector, so repeated
/// runs are bit-stable. When the iteration fails to converge within
/// kPowerIterationCap (or lands below the cheap row/column norm lower
/// bound, which flags a start vector orthogonal to the top singular
/// space), falls back to a full SVD for matrices below kSvdFallbackDim per
/// side and raises ResourceError above it.
double spectral_norm(const Matrix& m, double tol = kDefaultSpectralTol);

/// Largest singular value by dense SVD; the independent oracle route.
double spectral_norm_svd(const Matrix& m);

/// rows x cols matrix of i.i.d. N(0, sigma^2) entries drawn row-major.
Matrix sample_gaussian(std::size_t rows, std::size_t cols, double sigma,
                       RngStream& rng);

}  // namespace convbound

#endif  // CONVBOUND_MATRIX_HPP
