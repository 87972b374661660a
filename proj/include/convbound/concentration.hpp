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

#ifndef CONVBOUND_CONCENTRATION_HPP
#define CONVBOUND_CONCENTRATION_HPP

#include <cstddef>
#include <functional>
#include <string>

#include "convbound/layer.hpp"

namespace convbound {

/// A spectral-norm tail bound: P(||U||_2 >= threshold(t)) <= tail_prob(t).
/// threshold is nondecreasing and tail_prob nonincreasing in t; tail values
/// are clamped to [0, 1] (union-bound prefactors make small-t values
/// vacuous).
struct TailBound {
  std::function<double(double)> threshold;
  std::function<double(double)> tail_prob;
  double prefactor = 1.0;
  std::string description;
};

/// Multiplier on q(sqrt(a)+sqrt(b)) in the sharp conv threshold.
inline constexpr double kAppendixConvConstant = 1.4;

/// Row/column-s-sparse Gaussian layer:
/// threshold sigma*(2 sqrt(s) + t), tail exp(-t^2/2).
TailBound bound_sparse(std::size_t s, double sigma);

/// Banded conv-support layer without weight sharing:
/// threshold sigma*(q(sqrt(a)+sqrt(b)) + t), tail exp(-t^2/2).
/// Independent of the feature-map size.
TailBound bound_convlike(std::size_t in_channels, std::size_t out_channels,
                         std::size_t filter_size, double sigma);

/// Weight-shared circular convolution:
/// threshold sigma*(c*q(sqrt(a)+sqrt(b)) + t) with c = 1.4 when
/// use_appendix_constant (the sharp form) else c = 1; tail
/// min(1, 2 N^dim exp(-t^2 / (2 q^dim))). The stated form is the 2d one
/// (2N^2, exponent t^2/2q^2); dim = 1 uses the N-event analogue.
TailBound bound_conv(std::size_t in_channels, std::size_t out_channels,
                     std::size_t filter_size, std::size_t map_size,
                     double sigma, bool use_appendix_constant = true,
                     int spatial_dims = 2);

/// General sparse-Gaussian bound evaluated exactly on a support mask:
/// sigma1 = max_i sqrt(row count), sigma2 = max_j sqrt(column count),
/// sigma* = 1 for a 0/1 mask;
/// threshold sigma*(1+eps)(sigma1 + sigma2
///   + (5/sqrt(ln(1+eps))) sigma* sqrt(ln(min(d1,d2))) + t),
/// tail exp(-t^2 / (2 sigma*^2)). Requires 0 < eps <= 1/2.
TailBound bound_bvh(const SupportMask& mask, double epsilon, double sigma);

inline constexpr double kDefaultBvhEpsilon = 0.5;

/// Dense Gaussian matrix: threshold sigma*(sqrt(rows) + sqrt(cols) + t),
/// tail exp(-t^2/2).
TailBound bound_gaussian_dense(std::size_t rows, std::size_t cols,
                               double sigma);

/// Exact support statistics entering bound_bvh.
struct MaskSigmas {
  double sigma1 = 0.0;  // max row sqrt(sum psi^2)
  double sigma2 = 0.0;  // max column sqrt(sum psi^2)
  double sigma_star = 0.0;
};
MaskSigmas mask_sigmas(const SupportMask& mask);

}  // namespace convbound

#endif  // CONVBOUND_CONCENTRATION_HPP
