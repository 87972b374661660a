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

#include "convbound/layer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "convbound/errors.hpp"

namespace convbound {

namespace {

// Max column count of the cyclic banded mask with band width `band` on a
// d_out x d_in matrix. Column j collects rows i with (i + k) mod d_in == j
// for some k < band.
std::size_t cyclic_mask_max_col_count(std::size_t d_out, std::size_t d_in,
                                      std::size_t band) {
  // residue_count[c] = #{i < d_out : i mod d_in == c}
  std::vector<std::size_t> residue_count(d_in, d_out / d_in);
  for (std::size_t c = 0; c < d_out % d_in; ++c) residue_count[c] += 1;
  // Column j sums residue_count over the band residues j, j-1, ..., j-band+1
  // (cyclically). Slide the window once around.
  std::size_t window = 0;
  for (std::size_t k = 0; k < band; ++k) {
    window += residue_count[(d_in - k % d_in) % d_in];
  }
  std::size_t best = window;
  for (std::size_t j = 1; j < d_in; ++j) {
    window += residue_count[j];
    window -= residue_count[(j + d_in - band % d_in) % d_in];
    best = std::max(best, window);
  }
  return best;
}

void emplace_sorted_mask(SupportMask& mask) {
  std::sort(mask.entries.begin(), mask.entries.end());
}

}  // namespace

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::DenseSparse:
      return "dense_sparse";
    case LayerKind::ConvLike:
      return "convlike";
    case LayerKind::Conv:
      return "conv";
  }
  return "unknown";
}

LayerSpec LayerSpec::dense_sparse(std::size_t d_in, std::size_t d_out,
                                  std::size_t sparsity) {
  LayerSpec spec;
  spec.kind = LayerKind::DenseSparse;
  spec.d_in = d_in;
  spec.d_out = d_out;
  spec.sparsity = sparsity;
  spec.validate();
  return spec;
}

LayerSpec LayerSpec::conv_like(std::size_t in_channels,
                               std::size_t out_channels,
                               std::size_t filter_size, std::size_t map_size,
                               int spatial_dims) {
  LayerSpec spec;
  spec.kind = LayerKind::ConvLike;
  spec.in_channels = in_channels;
  spec.out_channels = out_channels;
  spec.filter_size = filter_size;
  spec.map_size = map_size;
  spec.spatial_dims = spatial_dims;
  spec.validate();
  return spec;
}

LayerSpec LayerSpec::conv(std::size_t in_channels, std::size_t out_channels,
                          std::size_t filter_size, std::size_t map_size,
                          int spatial_dims) {
  LayerSpec spec = conv_like(in_channels, out_channels, filter_size, map_size,
                             spatial_dims);
  spec.kind = LayerKind::Conv;
  return spec;
}

std::size_t LayerSpec::positions() const {
  std::size_t p = map_size;
  for (int d = 1; d < spatial_dims; ++d) p *= map_size;
  return p;
}

std::size_t LayerSpec::filter_support() const {
  std::size_t f = filter_size;
  for (int d = 1; d < spatial_dims; ++d) f *= filter_size;
  return f;
}

std::size_t LayerSpec::rows() const {
  return kind == LayerKind::DenseSparse ? d_out : out_channels * positions();
}

std::size_t LayerSpec::cols() const {
  return kind == LayerKind::DenseSparse ? d_in : in_channels * positions();
}

std::size_t LayerSpec::free_parameters() const {
  switch (kind) {
    case LayerKind::DenseSparse:
      return d_out * std::min(sparsity, d_in);
    case LayerKind::ConvLike:
      return rows() * in_channels * filter_support();
    case LayerKind::Conv:
      return out_channels * in_channels * filter_support();
  }
  return 0;
}

void LayerSpec::validate() const {
  if (kind == LayerKind::DenseSparse) {
    if (d_in == 0 || d_out == 0) {
      throw InvalidInputError("dense_sparse layer needs positive d_in/d_out");
    }
    if (sparsity == 0) {
      throw InvalidInputError("dense_sparse layer needs sparsity >= 1");
    }
    if (sparsity > std::max(d_in, d_out)) {
      throw InvalidInputError(
          "dense_sparse sparsity " + std::to_string(sparsity) +
          " exceeds max(d_in, d_out) = " +
          std::to_string(std::max(d_in, d_out)));
    }
    const std::size_t band = std::min(sparsity, d_in);
    const std::size_t worst = cyclic_mask_max_col_count(d_out, d_in, band);
    if (worst > sparsity) {
      throw InvalidInputError(
          "dense_sparse(" + std::to_string(d_in) + "->" +
          std::to_string(d_out) + ", s=" + std::to_string(sparsity) +
          "): the banded mask would place " + std::to_string(worst) +
          " entries in some column, exceeding the cap s");
    }
    return;
  }
  if (in_channels == 0 || out_channels == 0 || filter_size == 0 ||
      map_size == 0) {
    throw InvalidInputError(std::string(layer_kind_name(kind)) +
                            " layer needs positive channels/filter/map sizes");
  }
  if (spatial_dims != 1 && spatial_dims != 2) {
    throw InvalidInputError("spatial_dims must be 1 or 2, got " +
                            std::to_string(spatial_dims));
  }
  if (filter_size > map_size) {
    throw InvalidInputError("filter size " + std::to_string(filter_size) +
                            " exceeds map size " + std::to_string(map_size));
  }
}

std::string LayerSpec::describe() const {
  if (kind == LayerKind::DenseSparse) {
    return "dense_sparse(" + std::to_string(d_in) + "->" +
           std::to_string(d_out) + " s=" + std::to_string(sparsity) + ")";
  }
  return std::string(layer_kind_name(kind)) + "(" +
         std::to_string(in_channels) + "->" + std::to_string(out_channels) +
         " q=" + std::to_string(filter_size) + " N=" +
         std::to_string(map_size) + " dim=" + std::to_string(spatial_dims) +
         ")";
}

bool SupportMask::contains(std::size_t row, std::size_t col) const {
  const std::pair<std::uint32_t, std::uint32_t> key{
      static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col)};
  return std::binary_search(entries.begin(), entries.end(), key);
}

std::vector<std::size_t> SupportMask::row_counts() const {
  std::vector<std::size_t> counts(rows, 0);
  for (const auto& [r, c] : entries) counts[r] += 1;
  return counts;
}

std::vector<std::size_t> SupportMask::col_counts() const {
  std::vector<std::size_t> counts(cols, 0);
  for (const auto& [r, c] : entries) counts[c] += 1;
  return counts;
}

void StructuredOperator::scale(double factor) {
  matrix *= factor;
  for (double& v : filter) v *= factor;
}

double StructuredOperator::free_frobenius_norm() const {
  if (spec.kind == LayerKind::Conv) {
    double acc = 0.0;
    for (double v : filter) acc += v * v;
    return std::sqrt(acc);
  }
  return frobenius_norm(matrix);
}

SupportMask build_mask(const LayerSpec& spec) {
  spec.validate();
  SupportMask mask;
  mask.rows = spec.rows();
  mask.cols = spec.cols();

  if (spec.kind == LayerKind::DenseSparse) {
    const std::size_t band = std::min(spec.sparsity, spec.d_in);
    mask.entries.reserve(spec.d_out * band);
    for (std::size_t i = 0; i < spec.d_out; ++i) {
      for (std::size_t k = 0; k < band; ++k) {
        mask.entries.emplace_back(static_cast<std::uint32_t>(i),
                                  static_cast<std::uint32_t>((i + k) %
                                                             spec.d_in));
      }
    }
    emplace_sorted_mask(mask);
    return mask;
  }

  const std::size_t n = spec.map_size;
  const std::size_t q = spec.filter_size;
  const std::size_t pos = spec.positions();
  mask.entries.reserve(spec.rows() * spec.in_channels * spec.filter_support());

  if (spec.spatial_dims == 1) {
    for (std::size_t j = 0; j < spec.out_channels; ++j) {
      for (std::size_t p = 0; p < n; ++p) {
        const std::size_t row = j * pos + p;
        for (std::size_t i = 0; i < spec.in_channels; ++i) {
          for (std::size_t k = 0; k < q; ++k) {
            const std::size_t col = i * pos + (p + k) % n;
            mask.entries.emplace_back(static_cast<std::uint32_t>(row),
                                      static_cast<std::uint32_t>(col));
          }
        }
      }
    }
  } else {
    for (std::size_t j = 0; j < spec.out_channels; ++j) {
      for (std::size_t p1 = 0; p1 < n; ++p1) {
        for (std::size_t p2 = 0; p2 < n; ++p2) {
          const std::size_t row = j * pos + p1 * n + p2;
          for (std::size_t i = 0; i < spec.in_channels; ++i) {
            for (std::size_t k1 = 0; k1 < q; ++k1) {
              for (std::size_t k2 = 0; k2 < q; ++k2) {
                const std::size_t col =
                    i * pos + ((p1 + k1) % n) * n + (p2 + k2) % n;
                mask.entries.emplace_back(static_cast<std::uint32_t>(row),
                                          static_cast<std::uint32_t>(col));
              }
            }
          }
        }
      }
    }
  }
  emplace_sorted_mask(mask);
  return mask;
}

namespace {

void check_cell_cap(const LayerSpec& spec) {
  const std::size_t cells = spec.rows() * spec.cols();
  if (cells > kOperatorCellCap) {
    throw ResourceError("operator " + spec.describe() + " has " +
                        std::to_string(cells) +
                        " cells, above the cap of " +
                        std::to_string(kOperatorCellCap));
  }
}

}  // namespace

StructuredOperator materialize_conv(const LayerSpec& spec,
                                    const std::vector<double>& filter) {
  spec.validate();
  if (spec.kind != LayerKind::Conv) {
    throw InvalidInputError("materialize_conv requires a conv spec, got " +
                            spec.describe());
  }
  check_cell_cap(spec);
  if (filter.size() != spec.free_parameters()) {
    throw InvalidInputError(
        "conv filter needs " + std::to_string(spec.free_parameters()) +
        " values, got " + std::to_string(filter.size()));
  }

  const std::size_t n = spec.map_size;
  const std::size_t q = spec.filter_size;
  const std::size_t pos = spec.positions();
  const std::size_t support = spec.filter_support();
  Matrix matrix(spec.rows(), spec.cols());

  for (std::size_t j = 0; j < spec.out_channels; ++j) {
    for (std::size_t i = 0; i < spec.in_channels; ++i) {
      const double* g = filter.data() + (j * spec.in_channels + i) * support;
      if (spec.spatial_dims == 1) {
        for (std::size_t p = 0; p < n; ++p) {
          for (std::size_t k = 0; k < q; ++k) {
            matrix(j * pos + p, i * pos + (p + k) % n) = g[k];
          }
        }
      } else {
        for (std::size_t p1 = 0; p1 < n; ++p1) {
          for (std::size_t p2 = 0; p2 < n; ++p2) {
            const std::size_t row = j * pos + p1 * n + p2;
            for (std::size_t k1 = 0; k1 < q; ++k1) {
              for (std::size_t k2 = 0; k2 < q; ++k2) {
                matrix(row, i * pos + ((p1 + k1) % n) * n + (p2 + k2) % n) =
                    g[k1 * q + k2];
              }
            }
          }
        }
      }
    }
  }
  return StructuredOperator{std::move(matrix), build_mask(spec), spec, filter};
}

StructuredOperator materialize_on_mask(const LayerSpec& spec,
                                       const std::vector<double>& values) {
  spec.validate();
  if (spec.kind == LayerKind::Conv) {
    throw InvalidInputError(
        "materialize_on_mask does not apply to conv specs; use "
        "materialize_conv");
  }
  check_cell_cap(spec);
  SupportMask mask = build_mask(spec);
  if (values.size() != mask.size()) {
    throw InvalidInputError("layer " + spec.describe() + " needs " +
                            std::to_string(mask.size()) + " values, got " +
                            std::to_string(values.size()));
  }
  Matrix matrix(spec.rows(), spec.cols());
  for (std::size_t idx = 0; idx < mask.entries.size(); ++idx) {
    matrix(mask.entries[idx].first, mask.entries[idx].second) = values[idx];
  }
  return StructuredOperator{std::move(matrix), std::move(mask), spec, {}};
}

StructuredOperator sample_perturbation(const LayerSpec& spec, double sigma,
                                       RngStream& rng) {
  spec.validate();
  if (sigma <= 0.0) {
    throw InvalidInputError("sample_perturbation: sigma must be positive");
  }
  check_cell_cap(spec);

  if (spec.kind == LayerKind::Conv) {
    std::vector<double> filter(spec.free_parameters());
    for (double& v : filter) v = sigma * rng.normal();
    return materialize_conv(spec, filter);
  }

  SupportMask mask = build_mask(spec);
  Matrix matrix(spec.rows(), spec.cols());
  for (const auto& [r, c] : mask.entries) {
    matrix(r, c) = sigma * rng.normal();
  }
  return StructuredOperator{std::move(matrix), std::move(mask), spec, {}};
}

StructuredOperator sparsify(const Matrix& weights, std::size_t s) {
  if (weights.empty()) {
    throw InvalidInputError("sparsify: empty matrix");
  }
  if (s == 0) {
    throw InvalidInputError("sparsify: s must be >= 1");
  }

  struct Entry {
    double magnitude;
    std::uint32_t row;
    std::uint32_t col;
  };
  std::vector<Entry> order;
  order.reserve(weights.rows() * weights.cols());
  for (std::size_t i = 0; i < weights.rows(); ++i) {
    for (std::size_t j = 0; j < weights.cols(); ++j) {
      const double v = weights(i, j);
      if (v != 0.0) {
        order.push_back(Entry{std::abs(v), static_cast<std::uint32_t>(i),
                              static_cast<std::uint32_t>(j)});
      }
    }
  }
  std::sort(order.begin(), order.end(), [](const Entry& a, const Entry& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });

  std::vector<std::size_t> row_used(weights.rows(), 0);
  std::vector<std::size_t> col_used(weights.cols(), 0);
  Matrix kept(weights.rows(), weights.cols());
  SupportMask mask;
  mask.rows = weights.rows();
  mask.cols = weights.cols();
  for (const Entry& e : order) {
    if (row_used[e.row] < s && col_used[e.col] < s) {
      row_used[e.row] += 1;
      col_used[e.col] += 1;
      kept(e.row, e.col) = weights(e.row, e.col);
      mask.entries.emplace_back(e.row, e.col);
    }
  }
  std::sort(mask.entries.begin(), mask.entries.end());

  LayerSpec spec;
  spec.kind = LayerKind::DenseSparse;
  spec.d_in = weights.cols();
  spec.d_out = weights.rows();
  spec.sparsity = std::min(s, std::max(weights.rows(), weights.cols()));
  return StructuredOperator{std::move(kept), std::move(mask), spec, {}};
}

double sparsification_margin(
    const std::vector<std::vector<double>>& original_outputs,
    const std::vector<std::vector<double>>& sparse_outputs) {
  if (original_outputs.size() != sparse_outputs.size()) {
    throw InvalidInputError("sparsification_margin: sample count mismatch");
  }
  double margin = 0.0;
  for (std::size_t i = 0; i < original_outputs.size(); ++i) {
    if (original_outputs[i].size() != sparse_outputs[i].size()) {
      throw InvalidInputError(
          "sparsification_margin: output dimension mismatch at sample " +
          std::to_string(i));
    }
    for (std::size_t j = 0; j < original_outputs[i].size(); ++j) {
      margin = std::max(margin,
                        std::abs(original_outputs[i][j] - sparse_outputs[i][j]));
    }
  }
  return margin;
}

}  // namespace convbound
