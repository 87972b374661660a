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

#ifndef CONVBOUND_LAYER_HPP
#define CONVBOUND_LAYER_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "convbound/matrix.hpp"
#include "convbound/rng.hpp"

namespace convbound {

enum class LayerKind {
  DenseSparse,  // fully connected with row/column sparsity cap s
  ConvLike,     // convolution support, independent (unshared) weights
  Conv,         // circular convolution with weight sharing
};

const char* layer_kind_name(LayerKind kind);

/// Structural description of one layer. Dense layers are d_out x d_in
/// with at most s nonzeros per row and column; conv-kind layers map
/// in_channels feature maps of side map_size to out_channels maps through
/// filters of side filter_size, circular boundary, stride 1, no bias.
struct LayerSpec {
  LayerKind kind = LayerKind::DenseSparse;

  // DenseSparse
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::size_t sparsity = 0;  // s

  // ConvLike / Conv
  std::size_t in_channels = 0;   // a
  std::size_t out_channels = 0;  // b
  std::size_t filter_size = 0;   // q (side length)
  std::size_t map_size = 0;      // N (feature-map side length)
  int spatial_dims = 2;          // 1 or 2

  static LayerSpec dense_sparse(std::size_t d_in, std::size_t d_out,
                                std::size_t sparsity);
  static LayerSpec conv_like(std::size_t in_channels, std::size_t out_channels,
                             std::size_t filter_size, std::size_t map_size,
                             int spatial_dims);
  static LayerSpec conv(std::size_t in_channels, std::size_t out_channels,
                        std::size_t filter_size, std::size_t map_size,
                        int spatial_dims);

  bool is_conv_kind() const { return kind != LayerKind::DenseSparse; }

  /// Materialized operator shape.
  std::size_t rows() const;
  std::size_t cols() const;

  /// N^dim and q^dim for conv kinds.
  std::size_t positions() const;
  std::size_t filter_support() const;

  /// Number of independent parameters: the mask size for DenseSparse and
  /// ConvLike, b*a*q^dim for Conv.
  std::size_t free_parameters() const;

  /// Throws InvalidInputError when the spec is not realizable (zero dims,
  /// q > N, bad spatial_dims, or a dense sparsity cap the banded mask
  /// cannot satisfy on both rows and columns).
  void validate() const;

  std::string describe() const;
};

/// Set of (row, col) index pairs carrying the operator's support.
struct SupportMask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;  // row-major

  std::size_t size() const { return entries.size(); }
  bool contains(std::size_t row, std::size_t col) const;
  std::vector<std::size_t> row_counts() const;
  std::vector<std::size_t> col_counts() const;
};

/// Materialized operator together with its support and structure. For Conv
/// specs `filter` holds the free parameters g[j][i][k...] flattened with j
/// (output channel) outermost and the filter offsets row-major innermost.
struct StructuredOperator {
  Matrix matrix;
  SupportMask mask;
  LayerSpec spec;
  std::vector<double> filter;

  void scale(double factor);

  /// Frobenius norm over free parameters (the filter for Conv layers).
  double free_frobenius_norm() const;
};

/// Cap on materialized operator cells; sample_perturbation refuses larger.
inline constexpr std::size_t kOperatorCellCap = 100000000;  // 1e8

/// Deterministic support for the given structure. DenseSparse: banded
/// cyclic placement (i, (i+k) mod d_in) for k < min(s, d_in), which has
/// exactly min(s, d_in) entries per row and at most s per column (specs
/// where the column cap cannot hold are rejected by validate()).
/// Conv kinds: row (j, p) connects to (i, p + k mod N) for every input
/// channel i and offset k in [0, q)^dim.
SupportMask build_mask(const LayerSpec& spec);

/// Random Gaussian operator on the spec's support. DenseSparse/ConvLike
/// draw one N(0, sigma^2) value per support entry (row-major order); Conv
/// draws the b*a*q^dim filter tensor and materializes it with weight
/// sharing.
StructuredOperator sample_perturbation(const LayerSpec& spec, double sigma,
                                       RngStream& rng);

/// Materialize a Conv operator from explicit filter values (layout as in
/// StructuredOperator::filter).
StructuredOperator materialize_conv(const LayerSpec& spec,
                                    const std::vector<double>& filter);

/// Dense/ConvLike operator from explicit values for each support entry in
/// row-major support order.
StructuredOperator materialize_on_mask(const LayerSpec& spec,
                                       const std::vector<double>& values);

/// Greedy magnitude sparsifier: visits entries in decreasing |value| (ties
/// broken by (row, col)) and keeps an entry iff its row and column both
/// still hold fewer than s kept entries. The result satisfies the row and
/// column cap exactly and re-applying with the same s is a no-op.
StructuredOperator sparsify(const Matrix& weights, std::size_t s);

/// Smallest margin gamma for which `sparse_outputs` is a (gamma, s)
/// approximation of `original_outputs`: the max over samples and
/// coordinates of the absolute difference.
double sparsification_margin(
    const std::vector<std::vector<double>>& original_outputs,
    const std::vector<std::vector<double>>& sparse_outputs);

}  // namespace convbound

#endif  // CONVBOUND_LAYER_HPP
