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
#include <numbers>

#include "convbound/errors.hpp"
#include "convbound/fourier.hpp"
#include "convbound/montecarlo.hpp"
#include "convbound/network.hpp"
#include "convbound/pacbayes.hpp"

using namespace convbound;

namespace {

ReluNetwork sample_network(const std::vector<LayerSpec>& specs,
                           double input_bound, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<StructuredOperator> layers;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    RngStream stream = rng.substream(i);
    layers.push_back(sample_perturbation(specs[i], 1.0, stream));
  }
  return ReluNetwork(std::move(layers), input_bound);
}

}  // namespace

TEST_CASE("mc summaries are deterministic and thread-count independent") {
  const LayerSpec spec = LayerSpec::conv_like(2, 2, 3, 8, 1);
  const McSummary one = mc_spectral_norm(spec, 1.0, 40, RngStream(4242), 1);
  const McSummary four = mc_spectral_norm(spec, 1.0, 40, RngStream(4242), 4);
  REQUIRE(one.norms.size() == four.norms.size());
  for (std::size_t i = 0; i < one.norms.size(); ++i) {
    CHECK(one.norms[i] == four.norms[i]);
  }
  CHECK(one.mean == four.mean);
  CHECK(one.stddev == four.stddev);
}

TEST_CASE("1x1 conv norms follow the half-normal law") {
  const LayerSpec spec = LayerSpec::conv(1, 1, 1, 4, 2);
  const McSummary summary =
      mc_spectral_norm(spec, 1.0, 500, RngStream(31337), 4);
  // Each trial's norm is |g0|; the mean estimates sqrt(2/pi).
  CHECK(std::abs(summary.mean - std::sqrt(2.0 / std::numbers::pi)) < 0.1);
  CHECK(summary.min >= 0.0);
}

TEST_CASE("fft and materialized norm paths agree on the same draws") {
  const LayerSpec spec = LayerSpec::conv(2, 2, 3, 6, 2);
  const RngStream root(321);
  const McSummary fft_path = mc_spectral_norm(spec, 1.0, 20, root, 2);
  for (std::size_t t = 0; t < 20; ++t) {
    RngStream stream = root.substream(t);
    const StructuredOperator op = sample_perturbation(spec, 1.0, stream);
    const double direct = spectral_norm(op.matrix, 1e-12);
    CHECK(std::abs(fft_path.norms[t] - direct) <=
          1e-7 * std::max(direct, 1e-30));
  }
}

TEST_CASE("dense summary sits near the closed-form level") {
  const LayerSpec spec = LayerSpec::dense_sparse(100, 100, 100);
  const McSummary summary =
      mc_spectral_norm(spec, 1.0, 100, RngStream(2718), 4);
  CHECK(summary.mean >= 0.85 * 20.0);
  CHECK(summary.mean <= 20.0);
  CHECK(summary.exceed_count(summary.max + 1.0) == 0);
  CHECK(summary.exceed_count(0.0) == 100);
}

TEST_CASE("channel sweep rows are monotone in the channel count") {
  const ExperimentReport report =
      channel_sweep(LayerKind::ConvLike, 1, 3, 12, {1, 2, 4}, 1.0, 20,
                    RngStream(99), 4);
  REQUIRE(report.rows().size() == 3);
  const std::size_t mean_col = report.column_index("empirical_mean");
  const std::size_t theory_col = report.column_index("theory_threshold");
  double prev = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    const double mean = report.numeric_cell(r, mean_col);
    CHECK(mean >= prev);
    CHECK(mean <= report.numeric_cell(r, theory_col));
    prev = mean;
  }
}

TEST_CASE("forward pass basics") {
  // Identity single layer: output equals input (no activation after last).
  std::vector<StructuredOperator> layers;
  layers.push_back(sparsify(Matrix::identity(3), 3));
  const ReluNetwork identity_net(std::move(layers), 2.0);
  const std::vector<double> x{0.5, -0.75, 1.0};
  const std::vector<double> out = forward(identity_net, x);
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(out[i] == x[i]);

  // Zero input maps to zero output through any depth.
  const ReluNetwork net = sample_network(
      {LayerSpec::conv(1, 2, 3, 8, 1), LayerSpec::dense_sparse(16, 8, 4)},
      1.0, 5);
  const std::vector<double> zeros(net.input_dim(), 0.0);
  for (double v : forward(net, zeros)) CHECK(v == 0.0);

  // Positive homogeneity.
  RngStream rng(6);
  const auto probes = probe_inputs(1, net.input_dim(), 0.5, rng);
  const std::vector<double> base = forward(net, probes[0]);
  std::vector<double> scaled_input = probes[0];
  for (double& v : scaled_input) v *= 1.5;
  const std::vector<double> scaled = forward(net, scaled_input);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(scaled[i] == doctest::Approx(1.5 * base[i]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(forward(net, std::vector<double>(3, 0.0)),
                  InvalidInputError);
}

TEST_CASE("network composition is validated") {
  RngStream rng(7);
  std::vector<StructuredOperator> layers;
  layers.push_back(
      sample_perturbation(LayerSpec::conv(1, 2, 3, 8, 1), 1.0, rng));
  layers.push_back(
      sample_perturbation(LayerSpec::dense_sparse(10, 4, 2), 1.0, rng));
  CHECK_THROWS_WITH_AS(ReluNetwork(std::move(layers), 1.0),
                       doctest::Contains("do not compose"),
                       InvalidInputError);
}

TEST_CASE("single linear layer satisfies the operator-norm inequality") {
  std::vector<StructuredOperator> layers;
  layers.push_back(sparsify(Matrix::identity(6), 6));
  ReluNetwork net(std::move(layers), 1.0);

  RngStream probe_rng(11);
  const auto probes = probe_inputs(8, 6, 1.0, probe_rng);
  const PerturbationCheck check =
      check_perturbation_lemma(net, probes, 0.05, 50, RngStream(12), 4);
  CHECK(check.violations == 0);
  // For one linear layer the change is ||U x|| <= ||U|| B and the bound
  // carries an extra e^2.
  CHECK(check.max_ratio <= std::exp(-2.0) * (1.0 + 1e-9));
}

TEST_CASE("three-layer perturbation propagation holds on every trial") {
  const ReluNetwork raw = sample_network(
      {LayerSpec::conv(1, 2, 3, 16, 1), LayerSpec::dense_sparse(32, 16, 8),
       LayerSpec::dense_sparse(16, 4, 4)},
      1.0, 13);
  const auto [net, beta] = normalize_network(raw);
  CHECK(beta > 0.0);

  RngStream probe_rng(14);
  const auto probes = probe_inputs(8, net.input_dim(), 1.0, probe_rng);
  const PerturbationCheck check = check_perturbation_lemma(
      net, probes, 0.01 * beta, 100, RngStream(15), 4);
  CHECK(check.trials == 100);
  CHECK(check.violations == 0);
  CHECK(check.max_ratio <= 1.0);
}

TEST_CASE("perturbation check requires a normalized network") {
  const ReluNetwork raw = sample_network(
      {LayerSpec::conv(1, 2, 3, 8, 1), LayerSpec::dense_sparse(16, 8, 4)},
      1.0, 17);
  RngStream probe_rng(18);
  const auto probes = probe_inputs(4, raw.input_dim(), 1.0, probe_rng);
  CHECK_THROWS_AS(
      check_perturbation_lemma(raw, probes, 0.1, 10, RngStream(19), 2),
      InvalidInputError);
}

TEST_CASE("oversized noise exhausts the rejection budget") {
  std::vector<StructuredOperator> layers;
  layers.push_back(sparsify(Matrix::identity(4), 4));
  layers.push_back(sparsify(Matrix::identity(4), 4));
  ReluNetwork net(std::move(layers), 1.0);
  RngStream probe_rng(20);
  const auto probes = probe_inputs(4, 4, 1.0, probe_rng);
  // ||U|| must stay below 1/2; unit-deviation noise on a 4x4 support makes
  // that event vanishingly rare.
  CHECK_THROWS_AS(
      check_perturbation_lemma(net, probes, 5.0, 4, RngStream(21), 2),
      ResourceError);
}

TEST_CASE("noise-stability condition at the chosen deviation") {
  const ReluNetwork raw = sample_network(
      {LayerSpec::conv(1, 2, 3, 8, 1), LayerSpec::dense_sparse(16, 8, 4)},
      1.0, 23);
  const auto [net, beta] = normalize_network(raw);

  RngStream probe_rng(24);
  const auto probes = probe_inputs(8, net.input_dim(), 1.0, probe_rng);
  const SigmaConditionCheck check =
      check_sigma_condition(net, probes, 1.0, 200, RngStream(25), 4);
  CHECK(check.sigma > 0.0);
  CHECK(check.frequency >= 0.5);
  CHECK(check.conditioned_trials > 0);
  CHECK(check.conditioned_frequency >= 0.5);
  CHECK(check.doubled_sigma_frequency >= 0.0);

  // For a single layer the chosen deviation keeps the output change at
  // gamma/42 or less, so the condition holds at every margin, huge ones
  // included. (At depth >= 2 the deviation grows with gamma and the
  // perturbed network leaves the linear regime, so "huge margin" is not
  // vacuous there.)
  std::vector<StructuredOperator> single;
  {
    RngStream rng(260);
    single.push_back(
        sample_perturbation(LayerSpec::dense_sparse(6, 6, 3), 1.0, rng));
  }
  const ReluNetwork one_layer(std::move(single), 1.0);
  RngStream one_probe_rng(261);
  const auto one_probes = probe_inputs(8, 6, 1.0, one_probe_rng);
  const SigmaConditionCheck vacuous = check_sigma_condition(
      one_layer, one_probes, 1e6, 50, RngStream(26), 4);
  CHECK(vacuous.frequency == 1.0);
}

TEST_CASE("probe inputs are unit scaled and deterministic") {
  RngStream a(27);
  RngStream b(27);
  const auto first = probe_inputs(5, 7, 2.0, a);
  const auto second = probe_inputs(5, 7, 2.0, b);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(vector_norm(first[i]) == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t j = 0; j < 7; ++j) CHECK(first[i][j] == second[i][j]);
  }
}
