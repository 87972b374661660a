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

#include "convbound/fourier.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "convbound/concentration.hpp"
#include "convbound/errors.hpp"

namespace convbound {

namespace {

void require_conv(const LayerSpec& spec, const char* op) {
  if (spec.kind != LayerKind::Conv) {
    throw InvalidInputError(std::string(op) + " requires a conv spec, got " +
                            spec.describe());
  }
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

std::vector<FrequencyBlock> frequency_blocks(const StructuredOperator& op) {
  require_conv(op.spec, "frequency_blocks");
  const LayerSpec& spec = op.spec;
  const std::size_t n = spec.map_size;
  const std::size_t q = spec.filter_size;
  const std::size_t support = spec.filter_support();
  const std::size_t a = spec.in_channels;
  const std::size_t b = spec.out_channels;
  if (op.filter.size() != spec.free_parameters()) {
    throw InvalidInputError("frequency_blocks: operator carries no filter");
  }

  std::vector<FrequencyBlock> blocks;
  blocks.reserve(spec.positions());

  auto block_at = [&](std::size_t n1, std::size_t n2) {
    FrequencyBlock block;
    block.frequency = {n1, n2};
    block.real_part = Matrix(b, a);
    block.imag_part = Matrix(b, a);
    for (std::size_t j = 0; j < b; ++j) {
      for (std::size_t i = 0; i < a; ++i) {
        const double* g = op.filter.data() + (j * a + i) * support;
        double re = 0.0;
        double im = 0.0;
        if (spec.spatial_dims == 1) {
          for (std::size_t k = 0; k < q; ++k) {
            const double phase =
                kTwoPi * static_cast<double>(k * n1) / static_cast<double>(n);
            re += g[k] * std::cos(phase);
            im -= g[k] * std::sin(phase);
          }
        } else {
          for (std::size_t k1 = 0; k1 < q; ++k1) {
            for (std::size_t k2 = 0; k2 < q; ++k2) {
              const double phase = kTwoPi *
                                   static_cast<double>(k1 * n1 + k2 * n2) /
                                   static_cast<double>(n);
              re += g[k1 * q + k2] * std::cos(phase);
              im -= g[k1 * q + k2] * std::sin(phase);
            }
          }
        }
        block.real_part(j, i) = re;
        block.imag_part(j, i) = im;
      }
    }
    return block;
  };

  if (spec.spatial_dims == 1) {
    for (std::size_t n1 = 0; n1 < n; ++n1) blocks.push_back(block_at(n1, 0));
  } else {
    for (std::size_t n1 = 0; n1 < n; ++n1) {
      for (std::size_t n2 = 0; n2 < n; ++n2) {
        blocks.push_back(block_at(n1, n2));
      }
    }
  }
  return blocks;
}

double complex_block_norm(const Matrix& real_part, const Matrix& imag_part) {
  if (real_part.rows() != imag_part.rows() ||
      real_part.cols() != imag_part.cols()) {
    throw InvalidInputError("complex_block_norm: re/im shape mismatch");
  }
  const auto rows = static_cast<Eigen::Index>(real_part.rows());
  const auto cols = static_cast<Eigen::Index>(real_part.cols());
  Eigen::MatrixXd embedding(2 * rows, 2 * cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = real_part(static_cast<std::size_t>(i),
                                  static_cast<std::size_t>(j));
      const double im = imag_part(static_cast<std::size_t>(i),
                                  static_cast<std::size_t>(j));
      embedding(i, j) = re;
      embedding(i, cols + j) = -im;
      embedding(rows + i, j) = im;
      embedding(rows + i, cols + j) = re;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(embedding);
  return svd.singularValues()(0);
}

double conv_spectral_norm_fft(const StructuredOperator& op) {
  const std::vector<FrequencyBlock> blocks = frequency_blocks(op);
  double best = 0.0;
  for (const FrequencyBlock& block : blocks) {
    best = std::max(best, complex_block_norm(block.real_part, block.imag_part));
  }
  return best;
}

ReImVariances reim_variances(const LayerSpec& spec) {
  spec.validate();
  if (!spec.is_conv_kind()) {
    throw InvalidInputError("reim_variances requires a conv-structured spec");
  }
  const std::size_t n = spec.map_size;
  const std::size_t q = spec.filter_size;
  ReImVariances out;
  out.sigma_re.reserve(spec.positions());
  out.sigma_im.reserve(spec.positions());

  auto accumulate = [&](std::size_t n1, std::size_t n2) {
    double cos_sq = 0.0;
    double sin_sq = 0.0;
    if (spec.spatial_dims == 1) {
      for (std::size_t k = 0; k < q; ++k) {
        const double phase =
            kTwoPi * static_cast<double>(k * n1) / static_cast<double>(n);
        cos_sq += std::cos(phase) * std::cos(phase);
        sin_sq += std::sin(phase) * std::sin(phase);
      }
    } else {
      for (std::size_t k1 = 0; k1 < q; ++k1) {
        for (std::size_t k2 = 0; k2 < q; ++k2) {
          const double phase =
              kTwoPi * (static_cast<double>(k1 * n1 + k2 * n2)) /
              static_cast<double>(n);
          cos_sq += std::cos(phase) * std::cos(phase);
          sin_sq += std::sin(phase) * std::sin(phase);
        }
      }
    }
    out.sigma_re.push_back(std::sqrt(cos_sq));
    out.sigma_im.push_back(std::sqrt(sin_sq));
  };

  if (spec.spatial_dims == 1) {
    for (std::size_t n1 = 0; n1 < n; ++n1) accumulate(n1, 0);
  } else {
    for (std::size_t n1 = 0; n1 < n; ++n1) {
      for (std::size_t n2 = 0; n2 < n; ++n2) accumulate(n1, n2);
    }
  }
  return out;
}

double union_bound_threshold(const LayerSpec& spec, double sigma,
                             double tail_level) {
  spec.validate();
  if (!spec.is_conv_kind()) {
    throw InvalidInputError(
        "union_bound_threshold requires a conv-structured spec");
  }
  if (sigma <= 0.0) {
    throw InvalidInputError("union_bound_threshold: sigma must be positive");
  }
  if (!(tail_level > 0.0 && tail_level < 1.0)) {
    throw InvalidInputError(
        "union_bound_threshold: tail level must lie in (0, 1)");
  }
  const double frequencies =
      spec.spatial_dims == 2
          ? static_cast<double>(spec.map_size * spec.map_size)
          : static_cast<double>(spec.map_size);
  const double log_term = std::sqrt(2.0 * std::log(2.0 * frequencies /
                                                   tail_level));
  return sigma * kAppendixConvConstant *
         static_cast<double>(spec.filter_size) *
         (std::sqrt(static_cast<double>(spec.in_channels)) +
          std::sqrt(static_cast<double>(spec.out_channels)) + log_term);
}

}  // namespace convbound
