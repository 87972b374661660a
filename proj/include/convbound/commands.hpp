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

#ifndef CONVBOUND_COMMANDS_HPP
#define CONVBOUND_COMMANDS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "convbound/config.hpp"
#include "convbound/montecarlo.hpp"
#include "convbound/report.hpp"

namespace convbound {

/// Channel sweep over both conv-structured kinds: empirical spectral-norm
/// statistics next to the closed-form thresholds.
struct Figure3Options {
  std::vector<std::size_t> channels{1, 2, 4, 8, 16};
  std::size_t filter_size = 5;
  std::size_t map_size = 64;
  int spatial_dims = 1;
  double sigma = 1.0;
  std::size_t trials = 100;
  std::uint64_t seed = 12345;
  int threads = kDefaultThreads;
};
ExperimentReport cmd_figure3(const Figure3Options& options);

/// Per-layer capacity constants c_i^2 under the four estimates (ambient
/// shape, sparsified, convlike, conv). `sparsity` is the zeroed fraction
/// used for the sparse estimate of every layer.
ExperimentReport cmd_figure4(const std::string& zoo_name, double sparsity);
ExperimentReport cmd_figure4(const std::vector<LayerSpec>& layers,
                             const std::string& name, double sparsity);

/// Order-of-magnitude capacity table over the built-in architectures,
/// structured vs ambient baseline, assuming unit spectral norms.
ExperimentReport cmd_table1(double gamma, std::size_t sample_count,
                            double delta, bool with_log_terms = true);

struct ValidateOutcome {
  ExperimentReport report;
  bool passed = false;
  std::size_t violations = 0;
  double sigma_condition_frequency = 0.0;
};
/// Runs the perturbation propagation check and the noise-stability check on
/// the config's network.
ValidateOutcome cmd_validate(const ParsedConfig& config);

/// One-off bound evaluation from an architecture config with supplied (or
/// assumed unit) norms.
ExperimentReport cmd_bound(const ParsedConfig& config, double margin_loss,
                           bool use_lemma_log_term = false);

/// Raw Monte Carlo spectral-norm summary for a single layer spec, with the
/// matching closed-form threshold and observed exceedances at the probed
/// tail offsets.
ExperimentReport cmd_mc(const LayerSpec& spec, double sigma,
                        std::size_t trials, std::uint64_t seed,
                        int threads = kDefaultThreads);

}  // namespace convbound

#endif  // CONVBOUND_COMMANDS_HPP
