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

#ifndef CONVBOUND_ZOO_HPP
#define CONVBOUND_ZOO_HPP

#include <string>
#include <string_view>
#include <vector>

#include "convbound/layer.hpp"

namespace convbound {

/// Canonical feedforward architecture with published layer shapes. Dense
/// layers carry a sparsity cap derived from `default_dense_sparsity`
/// (fraction of zeroed entries; s = (1 - sparsity) * d_in, at least 1);
/// with_sparsity() rebuilds them for another level. Pooling between blocks
/// is not modeled as an operator; each conv layer records the feature-map
/// side it actually sees, which is all the capacity constants consume.
struct ZooEntry {
  std::string name;
  std::vector<LayerSpec> layers;
  double default_dense_sparsity = 0.9;
  std::string source;

  std::vector<LayerSpec> with_sparsity(double sparsity) const;
};

const std::vector<ZooEntry>& builtin_zoo();

/// nullptr when the name is unknown.
const ZooEntry* find_zoo_entry(std::string_view name);

/// Comma-separated entry names, for error messages and listings.
std::string zoo_names();

}  // namespace convbound

#endif  // CONVBOUND_ZOO_HPP
