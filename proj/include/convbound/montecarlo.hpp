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

#ifndef CONVBOUND_MONTECARLO_HPP
#define CONVBOUND_MONTECARLO_HPP

#include <cstddef>
#include <vector>

#include "convbound/concentration.hpp"
#include "convbound/layer.hpp"
#include "convbound/network.hpp"
#include "convbound/report.hpp"
#include "convbound/rng.hpp"

namespace convbound {

/// Trials run in parallel but trial k always derives its noise from
/// substream(k), so summaries are identical for every thread count.
inline constexpr int kDefaultThreads = 4;

/// Probed tail offsets for exceedance counting.
inline const std::vector<double> kDefaultProbeOffsets{0.0, 1.0, 2.0, 3.0};

struct McSummary {
  std::size_t trials = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stddev = 0.0;          // sample standard deviation
  std::vector<double> norms;    // per trial, in trial order

  /// Number of trials with norm >= level.
  std::size_t exceed_count(double level) const;
};

/// Spectral norms of `trials` sampled perturbation operators. Conv norms go
/// through the frequency-block route, everything else through power
/// iteration on the materialized matrix.
McSummary mc_spectral_norm(const LayerSpec& spec, double sigma,
                           std::size_t trials, const RngStream& rng,
                           int threads = kDefaultThreads);

/// One row per channel count (a = b = count): empirical mean/min/max/spread
/// plus the closed-form threshold at t = 0 and the full support-exact bound
/// with its log terms.
ExperimentReport channel_sweep(LayerKind kind, int spatial_dims,
                               std::size_t filter_size, std::size_t map_size,
                               const std::vector<std::size_t>& channel_values,
                               double sigma, std::size_t trials,
                               const RngStream& rng,
                               int threads = kDefaultThreads);

/// Per-trial outcome of the layerwise perturbation propagation check:
/// output change vs e^2 B beta^{d-1} sum_i ||U_i||_2, with every sampled
/// ||U_i||_2 kept below ||W_i||_2 / d by rejection.
struct PerturbationCheck {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  // max observed lhs/rhs
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::size_t total_resamples = 0;
};

inline constexpr std::size_t kRejectionCapPerTrial = 1000;

/// Requires an equal-spectral-norm (normalized) network.
PerturbationCheck check_perturbation_lemma(
    const ReluNetwork& net, const std::vector<std::vector<double>>& inputs,
    double sigma, std::size_t trials, const RngStream& rng,
    int threads = kDefaultThreads);

/// Frequency of {max over inputs of output change <= gamma/4} under
/// unconditioned layerwise Gaussian noise at the deviation chosen by
/// compute_sigma. Also reports the frequency conditioned on the event that
/// every layer satisfied ||U_i|| <= ||W_i||/d, and a diagnostic pass at
/// twice the chosen deviation.
struct SigmaConditionCheck {
  double sigma = 0.0;
  double gamma = 0.0;
  std::size_t trials = 0;
  double frequency = 0.0;              // unconditioned
  double conditioned_frequency = 0.0;  // within the small-perturbation event
  std::size_t conditioned_trials = 0;
  double doubled_sigma_frequency = 0.0;
};

SigmaConditionCheck check_sigma_condition(
    const ReluNetwork& net, const std::vector<std::vector<double>>& inputs,
    double gamma, std::size_t trials, const RngStream& rng,
    int threads = kDefaultThreads);

}  // namespace convbound

#endif  // CONVBOUND_MONTECARLO_HPP
