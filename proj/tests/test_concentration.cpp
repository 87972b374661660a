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

#include <cmath>

#include "convbound/concentration.hpp"
#include "convbound/errors.hpp"
#include "convbound/montecarlo.hpp"

using namespace convbound;

namespace {

SupportMask all_ones_mask(std::size_t rows, std::size_t cols) {
  SupportMask mask;
  mask.rows = rows;
  mask.cols = cols;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      mask.entries.emplace_back(static_cast<std::uint32_t>(r),
                                static_cast<std::uint32_t>(c));
    }
  }
  return mask;
}

}  // namespace

TEST_CASE("sparse layer bound") {
  const TailBound b = bound_sparse(4, 1.0);
  CHECK(b.threshold(0.0) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(b.tail_prob(0.0) == doctest::Approx(1.0));

  const TailBound scaled = bound_sparse(1, 2.0);
  CHECK(scaled.threshold(2.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(scaled.tail_prob(2.0) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("a fully dense cap matches the rectangular Gaussian bound") {
  // s = d on a dense d x d layer: 2 sqrt(d) vs sqrt(d) + sqrt(d).
  for (std::size_t d : {4u, 9u, 100u}) {
    const TailBound sparse = bound_sparse(d, 1.0);
    const TailBound dense = bound_gaussian_dense(d, d, 1.0);
    CHECK(sparse.threshold(0.0) == doctest::Approx(dense.threshold(0.0)));
  }
}

TEST_CASE("convlike bound") {
  CHECK(bound_convlike(1, 1, 1, 1.0).threshold(0.0) ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(bound_convlike(2, 2, 3, 1.0).threshold(0.0) ==
        doctest::Approx(3.0 * 2.0 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(bound_convlike(2, 2, 3, 1.0).tail_prob(1.0) ==
        doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("conv bound with the sharp constant") {
  const TailBound b = bound_conv(1, 1, 1, 4, 1.0);
  CHECK(b.threshold(0.0) == doctest::Approx(2.8).epsilon(1e-15));
  CHECK(b.prefactor == doctest::Approx(32.0));
  CHECK(b.tail_prob(0.0) == doctest::Approx(1.0));  // clamped

  // Inverting the tail: at t = q sqrt(2 ln(2 N^2 / T)) the bound reaches T.
  const std::size_t q = 3, n = 8;
  const TailBound c = bound_conv(2, 5, q, n, 1.0);
  const double target = 0.25;
  const double t = static_cast<double>(q) *
                   std::sqrt(2.0 * std::log(2.0 * n * n / target));
  CHECK(c.tail_prob(t) == doctest::Approx(target).epsilon(1e-12));
}

TEST_CASE("main-text and sharp conv thresholds differ by exactly 1.4") {
  const TailBound sharp = bound_conv(3, 2, 5, 16, 1.0, true);
  const TailBound plain = bound_conv(3, 2, 5, 16, 1.0, false);
  CHECK(sharp.threshold(0.0) ==
        doctest::Approx(1.4 * plain.threshold(0.0)).epsilon(1e-14));
}

TEST_CASE("1d conv tail uses the per-row frequency count") {
  const TailBound b1 = bound_conv(1, 1, 3, 16, 1.0, true, 1);
  CHECK(b1.prefactor == doctest::Approx(2.0 * 16.0));
  const TailBound b2 = bound_conv(1, 1, 3, 16, 1.0, true, 2);
  CHECK(b2.prefactor == doctest::Approx(2.0 * 256.0));
}

TEST_CASE("support statistics of exact masks") {
  const MaskSigmas ones = mask_sigmas(all_ones_mask(16, 16));
  CHECK(ones.sigma1 == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(ones.sigma2 == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(ones.sigma_star == 1.0);

  const SupportMask conv_mask = build_mask(LayerSpec::conv_like(2, 3, 3, 8, 2));
  const MaskSigmas sigmas = mask_sigmas(conv_mask);
  CHECK(sigmas.sigma1 == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(sigmas.sigma2 == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("support-exact bound value") {
  const TailBound b = bound_bvh(all_ones_mask(16, 16), 0.5, 1.0);
  // 1.5 * (8 + (5 / sqrt(ln 1.5)) * sqrt(ln 16))
  CHECK(b.threshold(0.0) == doctest::Approx(31.612242109307).epsilon(1e-12));
  CHECK(b.tail_prob(1.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("support-exact bound recovers the convlike leading term") {
  const LayerSpec spec = LayerSpec::conv_like(2, 3, 3, 8, 2);
  const MaskSigmas sigmas = mask_sigmas(build_mask(spec));
  const double q = 3.0;
  CHECK(sigmas.sigma1 + sigmas.sigma2 ==
        doctest::Approx(q * (std::sqrt(2.0) + std::sqrt(3.0)))
            .epsilon(1e-14));
}

TEST_CASE("support-exact bound input validation") {
  const SupportMask mask = all_ones_mask(4, 4);
  CHECK_THROWS_AS(bound_bvh(mask, 0.0, 1.0), InvalidInputError);
  CHECK_THROWS_AS(bound_bvh(mask, 0.6, 1.0), InvalidInputError);
  CHECK_THROWS_AS(bound_bvh(SupportMask{4, 4, {}}, 0.5, 1.0),
                  InvalidInputError);
  CHECK_NOTHROW(bound_bvh(mask, 0.5, 1.0));
}

TEST_CASE("dense Gaussian bound") {
  CHECK(bound_gaussian_dense(100, 100, 1.0).threshold(0.0) ==
        doctest::Approx(20.0).epsilon(1e-15));
  CHECK(bound_gaussian_dense(1, 1, 1.0).threshold(0.0) ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("thresholds are homogeneous in sigma") {
  const double t = 1.7;
  const SupportMask mask = build_mask(LayerSpec::conv_like(2, 2, 2, 5, 1));
  const std::pair<TailBound, TailBound> pairs[] = {
      {bound_sparse(7, 1.0), bound_sparse(7, 3.0)},
      {bound_convlike(2, 3, 4, 1.0), bound_convlike(2, 3, 4, 3.0)},
      {bound_conv(2, 3, 4, 9, 1.0), bound_conv(2, 3, 4, 9, 3.0)},
      {bound_gaussian_dense(5, 8, 1.0), bound_gaussian_dense(5, 8, 3.0)},
      {bound_bvh(mask, 0.5, 1.0), bound_bvh(mask, 0.5, 3.0)},
  };
  for (const auto& [unit, tripled] : pairs) {
    CHECK(tripled.threshold(t) ==
          doctest::Approx(3.0 * unit.threshold(t)).epsilon(1e-12));
  }
}

TEST_CASE("thresholds grow and tails shrink in t") {
  const TailBound bounds[] = {
      bound_sparse(5, 0.7), bound_convlike(2, 4, 3, 1.3),
      bound_conv(2, 4, 3, 8, 1.3), bound_gaussian_dense(6, 11, 0.9),
      bound_bvh(all_ones_mask(6, 11), 0.25, 1.0)};
  for (const TailBound& b : bounds) {
    double prev_threshold = -1.0;
    double prev_tail = 2.0;
    for (double t : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      CHECK(b.threshold(t) > prev_threshold);
      CHECK(b.tail_prob(t) <= prev_tail);
      CHECK(b.tail_prob(t) <= 1.0);
      CHECK(b.tail_prob(t) >= 0.0);
      prev_threshold = b.threshold(t);
      prev_tail = b.tail_prob(t);
    }
  }
}

TEST_CASE("monte carlo exceedances stay below the stated tails") {
  // Reduced-size version of the acceptance tail check.
  const std::size_t trials = 200;

  SUBCASE("banded sparse layer") {
    const LayerSpec spec = LayerSpec::dense_sparse(60, 60, 8);
    const McSummary summary =
        mc_spectral_norm(spec, 1.0, trials, RngStream(808), 4);
    const TailBound bound = bound_sparse(8, 1.0);
    for (double t : kDefaultProbeOffsets) {
      const double tail = bound.tail_prob(t);
      const double se = std::sqrt(tail * (1.0 - tail) / trials);
      const double freq =
          static_cast<double>(summary.exceed_count(bound.threshold(t))) /
          trials;
      CHECK(freq <= tail + 3.0 * se + 1e-12);
    }
    // The simplified threshold drops log terms, so the mean may sit a few
    // percent above it at t = 0; the support-exact bound must still hold.
    const TailBound full = bound_bvh(build_mask(spec), 0.5, 1.0);
    CHECK(summary.mean <= full.threshold(0.0));
    CHECK(summary.mean <= bound.threshold(1.0));
  }

  SUBCASE("dense layer") {
    const LayerSpec spec = LayerSpec::dense_sparse(60, 60, 60);
    const McSummary summary =
        mc_spectral_norm(spec, 1.0, trials, RngStream(909), 4);
    const TailBound bound = bound_gaussian_dense(60, 60, 1.0);
    CHECK(summary.mean <= bound.threshold(0.0));
    for (double t : kDefaultProbeOffsets) {
      const double tail = bound.tail_prob(t);
      const double se = std::sqrt(tail * (1.0 - tail) / trials);
      const double freq =
          static_cast<double>(summary.exceed_count(bound.threshold(t))) /
          trials;
      CHECK(freq <= tail + 3.0 * se + 1e-12);
    }
  }
}
