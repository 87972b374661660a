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

#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "convbound/errors.hpp"
#include "convbound/layer.hpp"
#include "convbound/matrix.hpp"

using namespace convbound;

namespace {

bool mask_entries_equal(const SupportMask& a, const SupportMask& b) {
  return a.rows == b.rows && a.cols == b.cols && a.entries == b.entries;
}

// Exhaustive search for the best row/column-capped support of a small
// matrix, by retained squared mass. Independent of the greedy route.
double best_capped_mass(const Matrix& m, std::size_t s) {
  const std::size_t cells = m.rows() * m.cols();
  REQUIRE(cells <= 16);
  double best = 0.0;
  for (std::size_t subset = 0; subset < (1u << cells); ++subset) {
    std::vector<std::size_t> row_used(m.rows(), 0), col_used(m.cols(), 0);
    double mass = 0.0;
    bool feasible = true;
    for (std::size_t idx = 0; idx < cells && feasible; ++idx) {
      if (!(subset & (1u << idx))) continue;
      const std::size_t r = idx / m.cols();
      const std::size_t c = idx % m.cols();
      if (++row_used[r] > s || ++col_used[c] > s) feasible = false;
      mass += m(r, c) * m(r, c);
    }
    if (feasible) best = std::max(best, mass);
  }
  return best;
}

double kept_mass(const StructuredOperator& op) {
  double mass = 0.0;
  for (double v : op.matrix.data()) mass += v * v;
  return mass;
}

}  // namespace

TEST_CASE("convlike 1d mask is a circular band") {
  const SupportMask mask = build_mask(LayerSpec::conv_like(1, 1, 2, 4, 1));
  CHECK(mask.rows == 4);
  CHECK(mask.cols == 4);
  for (std::size_t count : mask.row_counts()) CHECK(count == 2);
  for (std::size_t count : mask.col_counts()) CHECK(count == 2);
}

TEST_CASE("1x1 conv mask is the identity support") {
  const SupportMask mask = build_mask(LayerSpec::conv(1, 1, 1, 3, 2));
  CHECK(mask.rows == 9);
  CHECK(mask.cols == 9);
  REQUIRE(mask.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(mask.contains(i, i));
}

TEST_CASE("2d convlike mask has exact row and column counts") {
  const SupportMask mask = build_mask(LayerSpec::conv_like(2, 3, 3, 8, 2));
  CHECK(mask.rows == 3 * 64);
  CHECK(mask.cols == 2 * 64);
  for (std::size_t count : mask.row_counts()) CHECK(count == 2 * 9);
  for (std::size_t count : mask.col_counts()) CHECK(count == 3 * 9);
}

TEST_CASE("conv and convlike masks coincide") {
  const SupportMask a = build_mask(LayerSpec::conv_like(2, 3, 3, 8, 2));
  const SupportMask b = build_mask(LayerSpec::conv(2, 3, 3, 8, 2));
  CHECK(mask_entries_equal(a, b));

  const SupportMask c = build_mask(LayerSpec::conv_like(2, 2, 3, 16, 1));
  const SupportMask d = build_mask(LayerSpec::conv(2, 2, 3, 16, 1));
  CHECK(mask_entries_equal(c, d));
}

TEST_CASE("dense mask is cyclic banded with capped columns") {
  const LayerSpec spec = LayerSpec::dense_sparse(10, 6, 3);
  const SupportMask mask = build_mask(spec);
  for (std::size_t count : mask.row_counts()) CHECK(count == 3);
  for (std::size_t count : mask.col_counts()) CHECK(count <= 3);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t k = 0; k < 3; ++k) CHECK(mask.contains(i, (i + k) % 10));
  }
}

TEST_CASE("layer spec validation") {
  CHECK_THROWS_AS(LayerSpec::conv(1, 1, 5, 4, 2), InvalidInputError);  // q > N
  CHECK_THROWS_AS(LayerSpec::conv(0, 1, 1, 4, 2), InvalidInputError);
  CHECK_THROWS_AS(LayerSpec::conv(1, 1, 1, 4, 3), InvalidInputError);
  CHECK_THROWS_AS(LayerSpec::dense_sparse(4, 4, 5), InvalidInputError);
  CHECK_THROWS_AS(LayerSpec::dense_sparse(4, 4, 0), InvalidInputError);
  // Tall matrix where the banded mask cannot keep columns under the cap.
  CHECK_THROWS_AS(LayerSpec::dense_sparse(2, 4, 1), InvalidInputError);
  // The cap never binds when s covers the whole tall shape.
  CHECK_NOTHROW(LayerSpec::dense_sparse(2, 4, 4));
}

TEST_CASE("1x1 conv perturbation is a scalar multiple of the identity") {
  RngStream rng(3);
  const StructuredOperator op =
      sample_perturbation(LayerSpec::conv(1, 1, 1, 4, 2), 1.0, rng);
  REQUIRE(op.filter.size() == 1);
  const double g0 = op.filter[0];
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 16; ++j) {
      CHECK(op.matrix(i, j) == (i == j ? g0 : 0.0));
    }
  }
}

TEST_CASE("perturbation sampling is deterministic") {
  RngStream a(17), b(17);
  const LayerSpec spec = LayerSpec::conv_like(1, 1, 2, 4, 1);
  const StructuredOperator first = sample_perturbation(spec, 1.0, a);
  const StructuredOperator second = sample_perturbation(spec, 1.0, b);
  for (std::size_t i = 0; i < spec.rows(); ++i) {
    for (std::size_t j = 0; j < spec.cols(); ++j) {
      CHECK(first.matrix(i, j) == second.matrix(i, j));
    }
  }
}

TEST_CASE("conv weight sharing: few free parameters, many cells") {
  RngStream rng(23);
  const LayerSpec spec = LayerSpec::conv(2, 2, 3, 8, 1);
  const StructuredOperator op = sample_perturbation(spec, 1.0, rng);
  CHECK(spec.free_parameters() == 12);
  CHECK(op.filter.size() == 12);
  CHECK(op.matrix.rows() * op.matrix.cols() == 256);

  std::set<double> distinct;
  for (double v : op.matrix.data()) {
    if (v != 0.0) distinct.insert(v);
  }
  CHECK(distinct.size() == 12);
}

TEST_CASE("conv materialization ties entries to the shared filter") {
  RngStream rng(29);
  const LayerSpec spec = LayerSpec::conv(2, 3, 2, 5, 2);
  const StructuredOperator op = sample_perturbation(spec, 1.0, rng);
  const std::size_t n = spec.map_size;
  const std::size_t pos = spec.positions();
  const std::size_t support = spec.filter_support();
  for (std::size_t j = 0; j < spec.out_channels; ++j) {
    for (std::size_t i = 0; i < spec.in_channels; ++i) {
      const double* g = op.filter.data() + (j * spec.in_channels + i) * support;
      for (std::size_t p1 = 0; p1 < n; ++p1) {
        for (std::size_t p2 = 0; p2 < n; ++p2) {
          for (std::size_t k1 = 0; k1 < spec.filter_size; ++k1) {
            for (std::size_t k2 = 0; k2 < spec.filter_size; ++k2) {
              const std::size_t row = j * pos + p1 * n + p2;
              const std::size_t col =
                  i * pos + ((p1 + k1) % n) * n + (p2 + k2) % n;
              CHECK(op.matrix(row, col) == g[k1 * spec.filter_size + k2]);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("conv equals convlike when the free entries are tied") {
  RngStream rng(31);
  const LayerSpec conv_spec = LayerSpec::conv(2, 2, 2, 6, 1);
  const StructuredOperator conv_op = sample_perturbation(conv_spec, 1.0, rng);

  // Materialize the same values through the unshared-weights route by
  // repeating each filter coefficient across positions.
  const LayerSpec like_spec = LayerSpec::conv_like(2, 2, 2, 6, 1);
  const SupportMask mask = build_mask(like_spec);
  std::vector<double> values;
  values.reserve(mask.size());
  const std::size_t n = like_spec.map_size;
  for (const auto& [row, col] : mask.entries) {
    const std::size_t j = row / n;
    const std::size_t p = row % n;
    const std::size_t i = col / n;
    const std::size_t k = (col % n + n - p) % n;
    values.push_back(
        conv_op.filter[(j * like_spec.in_channels + i) * 2 + k]);
  }
  const StructuredOperator like_op = materialize_on_mask(like_spec, values);
  for (std::size_t r = 0; r < conv_op.matrix.rows(); ++r) {
    for (std::size_t c = 0; c < conv_op.matrix.cols(); ++c) {
      CHECK(like_op.matrix(r, c) == conv_op.matrix(r, c));
    }
  }
}

TEST_CASE("perturbations vanish outside the mask") {
  RngStream rng(37);
  for (const LayerSpec& spec :
       {LayerSpec::conv_like(2, 1, 3, 6, 1), LayerSpec::conv(1, 2, 2, 4, 2),
        LayerSpec::dense_sparse(8, 5, 3)}) {
    RngStream stream = rng.substream(spec.rows());
    const StructuredOperator op = sample_perturbation(spec, 1.0, stream);
    for (std::size_t r = 0; r < op.matrix.rows(); ++r) {
      for (std::size_t c = 0; c < op.matrix.cols(); ++c) {
        if (!op.mask.contains(r, c)) CHECK(op.matrix(r, c) == 0.0);
      }
    }
  }
}

TEST_CASE("operator cell cap raises a resource error") {
  RngStream rng(41);
  const LayerSpec spec = LayerSpec::dense_sparse(20000, 20000, 10);
  CHECK_THROWS_AS(sample_perturbation(spec, 1.0, rng), ResourceError);
}

TEST_CASE("sparsify keeps an already sparse identity") {
  const StructuredOperator result = sparsify(Matrix::identity(4), 1);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(result.matrix(i, j) == (i == j ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("sparsify picks the dominant diagonal") {
  const Matrix m(2, 2, {5.0, 1.0, 2.0, 4.0});
  const StructuredOperator result = sparsify(m, 1);
  CHECK(result.matrix(0, 0) == 5.0);
  CHECK(result.matrix(0, 1) == 0.0);
  CHECK(result.matrix(1, 0) == 0.0);
  CHECK(result.matrix(1, 1) == 4.0);
  // On this instance greedy attains the exhaustive optimum.
  CHECK(kept_mass(result) == doctest::Approx(best_capped_mass(m, 1)));
}

TEST_CASE("sparsify with a non-binding cap is the identity map") {
  RngStream rng(43);
  const Matrix m = sample_gaussian(6, 9, 1.0, rng);
  const StructuredOperator result = sparsify(m, 9);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 9; ++c) {
      CHECK(result.matrix(r, c) == m(r, c));
    }
  }
}

TEST_CASE("sparsify respects the caps and is idempotent") {
  RngStream rng(47);
  for (int trial = 0; trial < 25; ++trial) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(trial));
    const std::size_t rows = 1 + stream.next_u64() % 12;
    const std::size_t cols = 1 + stream.next_u64() % 12;
    const std::size_t s = 1 + stream.next_u64() % std::max(rows, cols);
    const Matrix m = sample_gaussian(rows, cols, 1.0, stream);
    const StructuredOperator once = sparsify(m, s);

    for (std::size_t count : once.mask.row_counts()) CHECK(count <= s);
    for (std::size_t count : once.mask.col_counts()) CHECK(count <= s);

    const StructuredOperator twice = sparsify(once.matrix, s);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        CHECK(twice.matrix(r, c) == once.matrix(r, c));
      }
    }
  }
}

TEST_CASE("sparsification margin") {
  const std::vector<std::vector<double>> a{{1.0, 2.0}, {0.5, -1.0}};
  CHECK(sparsification_margin(a, a) == 0.0);

  std::vector<std::vector<double>> shifted = a;
  shifted[1][0] += 0.3;
  CHECK(sparsification_margin(a, shifted) == doctest::Approx(0.3));

  std::vector<std::vector<double>> wrong{{1.0}, {0.5, -1.0}};
  CHECK_THROWS_AS(sparsification_margin(a, wrong), InvalidInputError);
  CHECK_THROWS_AS(
      sparsification_margin(a, std::vector<std::vector<double>>{{1.0, 2.0}}),
      InvalidInputError);
}

TEST_CASE("no-op sparsification leaves layer outputs unchanged") {
  RngStream rng(53);
  const Matrix w = sample_gaussian(5, 7, 1.0, rng);
  const StructuredOperator sparse = sparsify(w, 7);

  std::vector<std::vector<double>> original, pruned;
  for (int i = 0; i < 4; ++i) {
    RngStream stream = rng.substream(static_cast<std::uint64_t>(100 + i));
    const Matrix x = sample_gaussian(7, 1, 1.0, stream);
    const std::vector<double> input(x.data().begin(), x.data().end());
    original.push_back(matvec(w, input));
    pruned.push_back(matvec(sparse.matrix, input));
  }
  CHECK(sparsification_margin(original, pruned) == 0.0);
}
