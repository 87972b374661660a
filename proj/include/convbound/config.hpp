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

#ifndef CONVBOUND_CONFIG_HPP
#define CONVBOUND_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convbound/network.hpp"
#include "convbound/pacbayes.hpp"

namespace convbound {

inline constexpr int kConfigSchemaVersion = 1;

struct ExperimentOptions {
  std::uint64_t seed = 12345;
  std::size_t trials = 100;
  /// Noise deviation for the perturbation checks; unset means "use the
  /// stability value from compute_sigma".
  std::optional<double> sigma;
  bool normalize = true;
  int threads = 4;
};

/// A parsed and fully validated config document.
struct ParsedConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "config";
  ArchitectureSpec arch;   // layers + optional norms (empty => assumed 1.0)
  BoundInputs bound;
  ExperimentOptions options;
  /// Optional explicit free parameters per layer (mask order for
  /// dense/convlike, filter order for conv).
  std::vector<std::vector<double>> weights;

  bool has_weights() const { return !weights.empty(); }
};

/// Parse a JSON config document. Unknown fields are rejected; schema
/// violations name the offending field; layers whose materialized shapes do
/// not compose name both layers.
ParsedConfig parse_config(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

/// Canonical serialization: fixed key order, defaults materialized.
/// Re-parsing the canonical form yields an identical config, and the
/// canonical form is a fixed point.
std::string canonical_config(const ParsedConfig& config);

/// Concrete network for the validation commands: explicit weights when
/// supplied, otherwise unit-deviation Gaussian weights drawn from the
/// config seed; normalized to equal spectral norms when options.normalize.
ReluNetwork build_network(const ParsedConfig& config);

/// Deterministic probe inputs for the network checks, scaled to the input
/// bound, derived from the config seed.
std::vector<std::vector<double>> config_probe_inputs(
    const ParsedConfig& config, std::size_t count = 16);

}  // namespace convbound

#endif  // CONVBOUND_CONFIG_HPP
