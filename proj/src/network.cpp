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

#include "convbound/network.hpp"

#include <algorithm>
#include <string>

#include "convbound/errors.hpp"

namespace convbound {

ReluNetwork::ReluNetwork(std::vector<StructuredOperator> layer_ops,
                         double bound)
    : layers(std::move(layer_ops)), input_bound(bound) {
  if (layers.empty()) {
    throw InvalidInputError("network needs at least one layer");
  }
  if (input_bound <= 0.0) {
    throw InvalidInputError("network input bound must be positive");
  }
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    if (layers[i + 1].matrix.cols() != layers[i].matrix.rows()) {
      throw InvalidInputError(
          "layers " + std::to_string(i) + " (" + layers[i].spec.describe() +
          ") and " + std::to_string(i + 1) + " (" +
          layers[i + 1].spec.describe() + ") do not compose: " +
          std::to_string(layers[i].matrix.rows()) + " outputs vs " +
          std::to_string(layers[i + 1].matrix.cols()) + " inputs");
    }
  }
}

std::size_t ReluNetwork::input_dim() const {
  return layers.front().matrix.cols();
}

std::size_t ReluNetwork::output_dim() const {
  return layers.back().matrix.rows();
}

std::vector<double> forward(const ReluNetwork& net,
                            std::span<const double> input) {
  if (net.layers.empty()) {
    throw InvalidInputError("forward: empty network");
  }
  if (input.size() != net.input_dim()) {
    throw InvalidInputError("forward: input dimension " +
                            std::to_string(input.size()) + " != " +
                            std::to_string(net.input_dim()));
  }
  std::vector<double> activation(input.begin(), input.end());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    activation = matvec(net.layers[i].matrix, activation);
    if (i + 1 < net.layers.size()) {
      for (double& v : activation) v = std::max(v, 0.0);
    }
  }
  return activation;
}

std::vector<double> layer_spectral_norms(const ReluNetwork& net, double tol) {
  std::vector<double> norms;
  norms.reserve(net.layers.size());
  for (const StructuredOperator& layer : net.layers) {
    norms.push_back(spectral_norm(layer.matrix, tol));
  }
  return norms;
}

std::vector<std::vector<double>> probe_inputs(std::size_t count,
                                              std::size_t dimension,
                                              double scale, RngStream rng) {
  if (count == 0 || dimension == 0) {
    throw InvalidInputError("probe_inputs: count and dimension must be >= 1");
  }
  std::vector<std::vector<double>> probes;
  probes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> probe(dimension);
    double norm = 0.0;
    while (norm == 0.0) {
      for (double& v : probe) v = rng.normal();
      norm = vector_norm(probe);
    }
    for (double& v : probe) v *= scale / norm;
    probes.push_back(std::move(probe));
  }
  return probes;
}

}  // namespace convbound
