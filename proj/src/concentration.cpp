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

#include "convbound/concentration.hpp"

#include <algorithm>
#include <cmath>

#include "convbound/errors.hpp"

namespace convbound {

namespace {

void require_sigma(double sigma, const char* op) {
  if (sigma <= 0.0) {
    throw InvalidInputError(std::string(op) + ": sigma must be positive");
  }
}

double clamp_prob(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

MaskSigmas mask_sigmas(const SupportMask& mask) {
  if (mask.entries.empty()) {
    throw InvalidInputError("mask_sigmas: empty support mask");
  }
  const auto rows = mask.row_counts();
  const auto cols = mask.col_counts();
  MaskSigmas sigmas;
  sigmas.sigma1 = std::sqrt(
      static_cast<double>(*std::max_element(rows.begin(), rows.end())));
  sigmas.sigma2 = std::sqrt(
      static_cast<double>(*std::max_element(cols.begin(), cols.end())));
  sigmas.sigma_star = 1.0;
  return sigmas;
}

TailBound bound_sparse(std::size_t s, double sigma) {
  require_sigma(sigma, "bound_sparse");
  if (s == 0) throw InvalidInputError("bound_sparse: s must be >= 1");
  const double level = 2.0 * std::sqrt(static_cast<double>(s));
  TailBound bound;
  bound.threshold = [sigma, level](double t) { return sigma * (level + t); };
  bound.tail_prob = [](double t) { return clamp_prob(std::exp(-t * t / 2.0)); };
  bound.prefactor = 1.0;
  bound.description = "sparse(s=" + std::to_string(s) + ")";
  return bound;
}

TailBound bound_convlike(std::size_t in_channels, std::size_t out_channels,
                         std::size_t filter_size, double sigma) {
  require_sigma(sigma, "bound_convlike");
  if (in_channels == 0 || out_channels == 0 || filter_size == 0) {
    throw InvalidInputError("bound_convlike: parameters must be >= 1");
  }
  const double level =
      static_cast<double>(filter_size) *
      (std::sqrt(static_cast<double>(in_channels)) +
       std::sqrt(static_cast<double>(out_channels)));
  TailBound bound;
  bound.threshold = [sigma, level](double t) { return sigma * (level + t); };
  bound.tail_prob = [](double t) { return clamp_prob(std::exp(-t * t / 2.0)); };
  bound.prefactor = 1.0;
  bound.description = "convlike(a=" + std::to_string(in_channels) +
                      ",b=" + std::to_string(out_channels) +
                      ",q=" + std::to_string(filter_size) + ")";
  return bound;
}

TailBound bound_conv(std::size_t in_channels, std::size_t out_channels,
                     std::size_t filter_size, std::size_t map_size,
                     double sigma, bool use_appendix_constant,
                     int spatial_dims) {
  require_sigma(sigma, "bound_conv");
  if (in_channels == 0 || out_channels == 0 || filter_size == 0 ||
      map_size == 0) {
    throw InvalidInputError("bound_conv: parameters must be >= 1");
  }
  if (spatial_dims != 1 && spatial_dims != 2) {
    throw InvalidInputError("bound_conv: spatial_dims must be 1 or 2");
  }
  const double c = use_appendix_constant ? kAppendixConvConstant : 1.0;
  const double level =
      c * static_cast<double>(filter_size) *
      (std::sqrt(static_cast<double>(in_channels)) +
       std::sqrt(static_cast<double>(out_channels)));
  const double frequencies =
      spatial_dims == 2 ? static_cast<double>(map_size * map_size)
                        : static_cast<double>(map_size);
  const double support = spatial_dims == 2
                             ? static_cast<double>(filter_size * filter_size)
                             : static_cast<double>(filter_size);
  TailBound bound;
  bound.threshold = [sigma, level](double t) { return sigma * (level + t); };
  bound.tail_prob = [frequencies, support](double t) {
    return clamp_prob(2.0 * frequencies * std::exp(-t * t / (2.0 * support)));
  };
  bound.prefactor = 2.0 * frequencies;
  bound.description = "conv(a=" + std::to_string(in_channels) +
                      ",b=" + std::to_string(out_channels) +
                      ",q=" + std::to_string(filter_size) +
                      ",N=" + std::to_string(map_size) +
                      (use_appendix_constant ? ",c=1.4" : ",c=1") + ")";
  return bound;
}

TailBound bound_bvh(const SupportMask& mask, double epsilon, double sigma) {
  require_sigma(sigma, "bound_bvh");
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    throw InvalidInputError("bound_bvh: epsilon must lie in (0, 1/2]");
  }
  const MaskSigmas sigmas = mask_sigmas(mask);
  const double min_dim =
      static_cast<double>(std::min(mask.rows, mask.cols));
  const double log_coeff = 5.0 / std::sqrt(std::log1p(epsilon));
  const double level =
      (1.0 + epsilon) *
      (sigmas.sigma1 + sigmas.sigma2 +
       log_coeff * sigmas.sigma_star * std::sqrt(std::log(min_dim)));
  const double one_plus_eps = 1.0 + epsilon;
  const double sigma_star = sigmas.sigma_star;
  TailBound bound;
  bound.threshold = [sigma, level, one_plus_eps](double t) {
    return sigma * (level + one_plus_eps * t);
  };
  bound.tail_prob = [sigma_star](double t) {
    return clamp_prob(std::exp(-t * t / (2.0 * sigma_star * sigma_star)));
  };
  bound.prefactor = 1.0;
  bound.description = "bvh(eps=" + std::to_string(epsilon) + ")";
  return bound;
}

TailBound bound_gaussian_dense(std::size_t rows, std::size_t cols,
                               double sigma) {
  require_sigma(sigma, "bound_gaussian_dense");
  if (rows == 0 || cols == 0) {
    throw InvalidInputError("bound_gaussian_dense: dimensions must be >= 1");
  }
  const double level = std::sqrt(static_cast<double>(rows)) +
                       std::sqrt(static_cast<double>(cols));
  TailBound bound;
  bound.threshold = [sigma, level](double t) { return sigma * (level + t); };
  bound.tail_prob = [](double t) { return clamp_prob(std::exp(-t * t / 2.0)); };
  bound.prefactor = 1.0;
  bound.description = "dense(" + std::to_string(rows) + "x" +
                      std::to_string(cols) + ")";
  return bound;
}

}  // namespace convbound
