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

#ifndef CONVBOUND_FOURIER_HPP
#define CONVBOUND_FOURIER_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "convbound/layer.hpp"

namespace convbound {

/// One frequency of the block-diagonalized conv operator: the b x a matrix
/// of channel-pair DFT coefficients, kept as a real/imaginary pair.
struct FrequencyBlock {
  std::array<std::size_t, 2> frequency{0, 0};  // second index 0 when dim = 1
  Matrix real_part;
  Matrix imag_part;
};

/// All N^dim frequency blocks of a Conv operator. Block (j, i) entries are
/// the dim-dimensional DFT of filter g^{ji} (zero-padded to N^dim),
/// lambda_n^{ji} = sum_k g^{ji}[k] exp(-2*pi*i <k, n> / N).
std::vector<FrequencyBlock> frequency_blocks(const StructuredOperator& op);

/// Largest singular value of a complex matrix given as (re, im), computed
/// on the real embedding [[Re, -Im], [Im, Re]] whose singular values are
/// exactly the complex ones (doubled).
double complex_block_norm(const Matrix& real_part, const Matrix& imag_part);

/// Exact spectral norm of a Conv operator: max over frequencies of the
/// block norm. Circular convolution is unitarily equivalent to this block
/// diagonal form, so the value equals spectral_norm of the materialized
/// matrix.
double conv_spectral_norm_fft(const StructuredOperator& op);

/// Per-frequency deviations of the real and imaginary DFT parts of a
/// unit-variance filter: sigma_re(n) = sqrt(sum_k cos^2(phase)),
/// sigma_im(n) = sqrt(sum_k sin^2(phase)). Satisfies
/// sigma_re^2 + sigma_im^2 = q^dim at every frequency.
struct ReImVariances {
  std::vector<double> sigma_re;  // flat frequency index
  std::vector<double> sigma_im;
};
ReImVariances reim_variances(const LayerSpec& spec);

/// Level L with P(||U||_2 <= L) >= 1 - tail_level for a Conv layer, from
/// the union bound over its frequency events:
/// sigma * 1.4 q (sqrt(a) + sqrt(b) + sqrt(2 ln(2 N^dim / tail_level))).
double union_bound_threshold(const LayerSpec& spec, double sigma,
                             double tail_level);

}  // namespace convbound

#endif  // CONVBOUND_FOURIER_HPP
