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

#include "convbound/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "convbound/errors.hpp"

namespace convbound {

namespace {

void require_positive_shape(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw InvalidInputError("matrix dimensions must be positive, got " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void require_finite(const Matrix& m, const char* op) {
  if (!m.all_finite()) {
    throw InvalidInputError(std::string(op) +
                            ": matrix contains non-finite entries");
  }
}

void require_nonempty(const Matrix& m, const char* op) {
  if (m.empty()) {
    throw InvalidInputError(std::string(op) + ": matrix is empty");
  }
}

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMajor> eigen_view(const Matrix& m) {
  return Eigen::Map<const EigenRowMajor>(
      m.data().data(), static_cast<Eigen::Index>(m.rows()),
      static_cast<Eigen::Index>(m.cols()));
}

// Deterministic start vector with no alignment to structured invariant
// subspaces. An all-ones start lies exactly in the zero-frequency subspace
// of weight-shared circular convolutions, which is invariant, so power
// iteration would converge to that block's top singular value instead of
// the global one. Hashed entries keep runs bit-stable without that trap.
std::vector<double> deterministic_start(std::size_t n) {
  std::vector<double> v(n);
  std::uint64_t z = 0x853c49e6748fea9bULL;
  double norm_sq = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    z += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = z;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    v[j] = static_cast<double>(x >> 11) * 0x1.0p-53 - 0.5;
    norm_sq += v[j] * v[j];
  }
  const double norm = std::sqrt(norm_sq);
  for (double& x : v) x /= norm;
  return v;
}

// max over rows and columns of their 2-norms; a lower bound on the largest
// singular value (||A e_j|| and ||A^T e_i|| are both <= sigma_1).
double row_col_norm_floor(const Matrix& m) {
  std::vector<double> col_sq(m.cols(), 0.0);
  double best_row = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row_sq = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      row_sq += v * v;
      col_sq[j] += v * v;
    }
    best_row = std::max(best_row, row_sq);
  }
  const double best_col = *std::max_element(col_sq.begin(), col_sq.end());
  return std::sqrt(std::max(best_row, best_col));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  require_positive_shape(rows, cols);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  require_positive_shape(rows, cols);
  if (data_.size() != rows * cols) {
    throw InvalidInputError(
        "entry count " + std::to_string(data_.size()) + " does not match " +
        std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!all_finite()) {
    throw InvalidInputError("matrix entries must all be finite");
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator*=(double scalar) {
  for (double& v : data_) v *= scalar;
  return *this;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw InvalidInputError("matrix addition shape mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) {
    throw InvalidInputError("matvec: vector length " +
                            std::to_string(x.size()) + " != cols " +
                            std::to_string(m.cols()));
  }
  std::vector<double> y(m.rows(), 0.0);
  const auto data = m.data();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = data.data() + i * m.cols();
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> matvec_transposed(const Matrix& m,
                                      std::span<const double> x) {
  if (x.size() != m.rows()) {
    throw InvalidInputError("matvec_transposed: vector length " +
                            std::to_string(x.size()) + " != rows " +
                            std::to_string(m.rows()));
  }
  std::vector<double> y(m.cols(), 0.0);
  const auto data = m.data();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = data.data() + i * m.cols();
    const double xi = x[i];
    for (std::size_t j = 0; j < m.cols(); ++j) y[j] += row[j] * xi;
  }
  return y;
}

double vector_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double frobenius_norm(const Matrix& m) {
  require_nonempty(m, "frobenius_norm");
  require_finite(m, "frobenius_norm");
  double acc = 0.0;
  for (double v : m.data()) acc += v * v;
  return std::sqrt(acc);
}

double spectral_norm_svd(const Matrix& m) {
  require_nonempty(m, "spectral_norm_svd");
  require_finite(m, "spectral_norm_svd");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(eigen_view(m));
  return svd.singularValues()(0);
}

double spectral_norm(const Matrix& m, double tol) {
  require_nonempty(m, "spectral_norm");
  require_finite(m, "spectral_norm");
  if (tol <= 0.0) {
    throw InvalidInputError("spectral_norm: tol must be positive");
  }

  // Single row or column: the norm is exactly the Euclidean entry norm.
  if (m.rows() == 1 || m.cols() == 1) return vector_norm(m.data());

  double frob_sq = 0.0;
  for (double v : m.data()) frob_sq += v * v;
  if (frob_sq == 0.0) return 0.0;

  const std::size_t n = m.cols();
  std::vector<double> v = deterministic_start(n);
  double sigma = 0.0;
  double prev_sigma = -1.0;
  bool converged = false;

  for (std::size_t iter = 0; iter < kPowerIterationCap; ++iter) {
    std::vector<double> w = matvec(m, v);
    sigma = vector_norm(w);
    if (sigma == 0.0) break;  // start vector in the null space
    for (double& x : w) x /= sigma;
    const std::vector<double> z = matvec_transposed(m, w);

    // m^T m v = sigma * z, so the eigen-residual of the estimate sigma^2 is
    // sigma * ||z - sigma v||.
    double resid_sq = 0.0;
    double zn_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = z[j] - sigma * v[j];
      resid_sq += d * d;
      zn_sq += z[j] * z[j];
    }
    if (zn_sq == 0.0) break;
    const double zn = std::sqrt(zn_sq);
    for (std::size_t j = 0; j < n; ++j) v[j] = z[j] / zn;

    const bool small_change =
        prev_sigma >= 0.0 && std::abs(sigma - prev_sigma) <= tol * sigma;
    const bool small_residual = std::sqrt(resid_sq) <= 2.0 * tol * sigma;
    if (small_change && small_residual) {
      converged = true;
      break;
    }
    prev_sigma = sigma;
  }

  if (converged) {
    // Guards against convergence inside a lower singular space, which can
    // only happen when the all-ones start is exactly orthogonal to the top
    // one; the row/column norm floor certifies the answer.
    const double floor = row_col_norm_floor(m);
    if (sigma >= floor * (1.0 - std::max(1e-9, 10.0 * tol))) return sigma;
  }

  if (m.rows() < kSvdFallbackDim && m.cols() < kSvdFallbackDim) {
    return spectral_norm_svd(m);
  }
  throw ResourceError(
      "spectral_norm: power iteration did not converge and the matrix "
      "exceeds the dense SVD fallback cap of " +
      std::to_string(kSvdFallbackDim));
}

Matrix sample_gaussian(std::size_t rows, std::size_t cols, double sigma,
                       RngStream& rng) {
  require_positive_shape(rows, cols);
  if (sigma <= 0.0) {
    throw InvalidInputError("sample_gaussian: sigma must be positive");
  }
  Matrix m(rows, cols);
  for (double& v : m.data()) v = sigma * rng.normal();
  return m;
}

}  // namespace convbound
