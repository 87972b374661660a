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

#ifndef CONVBOUND_NETWORK_HPP
#define CONVBOUND_NETWORK_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "convbound/layer.hpp"

namespace convbound {

/// Feedforward ReLU network over structured operators: ReLU between layers,
/// none after the last. input_bound is the max Euclidean norm of admissible
/// inputs.
struct ReluNetwork {
  std::vector<StructuredOperator> layers;
  double input_bound = 1.0;

  ReluNetwork() = default;
  /// Validates that consecutive layer shapes compose.
  ReluNetwork(std::vector<StructuredOperator> layers, double input_bound);

  std::size_t depth() const { return layers.size(); }
  std::size_t input_dim() const;
  std::size_t output_dim() const;
};

/// Final pre-activation output for a single input vector.
std::vector<double> forward(const ReluNetwork& net,
                            std::span<const double> input);

/// Spectral norm of every layer.
std::vector<double> layer_spectral_norms(const ReluNetwork& net,
                                         double tol = 1e-12);

/// `count` deterministic pseudo-random probe inputs of norm `scale` and the
/// given dimension, derived from the stream.
std::vector<std::vector<double>> probe_inputs(std::size_t count,
                                              std::size_t dimension,
                                              double scale, RngStream rng);

}  // namespace convbound

#endif  // CONVBOUND_NETWORK_HPP
