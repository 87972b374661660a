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

#include "convbound/zoo.hpp"

#include <algorithm>
#include <cmath>

#include "convbound/errors.hpp"

namespace convbound {

namespace {

std::size_t sparsity_cap(std::size_t d_in, double sparsity) {
  const double kept = (1.0 - sparsity) * static_cast<double>(d_in);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(kept)));
}

LayerSpec dense(std::size_t d_in, std::size_t d_out, double sparsity) {
  return LayerSpec::dense_sparse(d_in, d_out, sparsity_cap(d_in, sparsity));
}

LayerSpec conv2(std::size_t a, std::size_t b, std::size_t q, std::size_t n) {
  return LayerSpec::conv(a, b, q, n, 2);
}

void check_entry(const ZooEntry& entry) {
  for (const LayerSpec& layer : entry.layers) layer.validate();
  // Channel-level composition inside conv blocks (pooling between blocks is
  // not an operator, so materialized shapes are not required to chain).
  for (std::size_t i = 0; i + 1 < entry.layers.size(); ++i) {
    const LayerSpec& cur = entry.layers[i];
    const LayerSpec& next = entry.layers[i + 1];
    if (cur.is_conv_kind() && next.is_conv_kind() &&
        next.in_channels != cur.out_channels) {
      throw InvalidInputError(entry.name + ": conv layers " +
                              std::to_string(i) + " and " +
                              std::to_string(i + 1) +
                              " have mismatched channel counts");
    }
  }
}

std::vector<ZooEntry> make_zoo() {
  std::vector<ZooEntry> zoo;

  {
    ZooEntry e;
    e.name = "lenet5";
    e.default_dense_sparsity = 0.9;
    e.source =
        "LeCun et al., 1998; conv maps 28/10 for 32x32 inputs, dense "
        "400-120-84-10";
    e.layers = {conv2(1, 6, 5, 28), conv2(6, 16, 5, 10),
                dense(400, 120, 0.9), dense(120, 84, 0.9),
                dense(84, 10, 0.9)};
    zoo.push_back(std::move(e));
  }
  {
    ZooEntry e;
    e.name = "alexnet";
    e.default_dense_sparsity = 0.9;
    e.source =
        "Krizhevsky et al., 2012 (torchvision shapes); feature maps "
        "55/27/13/13/13, dense 9216-4096-4096-1000";
    e.layers = {conv2(3, 64, 11, 55),   conv2(64, 192, 5, 27),
                conv2(192, 384, 3, 13), conv2(384, 256, 3, 13),
                conv2(256, 256, 3, 13), dense(9216, 4096, 0.9),
                dense(4096, 4096, 0.9), dense(4096, 1000, 0.9)};
    zoo.push_back(std::move(e));
  }
  {
    ZooEntry e;
    e.name = "vgg16";
    e.default_dense_sparsity = 0.9;
    e.source =
        "Simonyan & Zisserman, 2014, configuration D; feature maps "
        "224/112/56/28/14, dense 25088-4096-4096-1000";
    e.layers = {conv2(3, 64, 3, 224),   conv2(64, 64, 3, 224),
                conv2(64, 128, 3, 112),  conv2(128, 128, 3, 112),
                conv2(128, 256, 3, 56),  conv2(256, 256, 3, 56),
                conv2(256, 256, 3, 56),  conv2(256, 512, 3, 28),
                conv2(512, 512, 3, 28),  conv2(512, 512, 3, 28),
                conv2(512, 512, 3, 14),  conv2(512, 512, 3, 14),
                conv2(512, 512, 3, 14),  dense(25088, 4096, 0.9),
                dense(4096, 4096, 0.9),  dense(4096, 1000, 0.9)};
    zoo.push_back(std::move(e));
  }

  for (const ZooEntry& entry : zoo) check_entry(entry);
  return zoo;
}

}  // namespace

std::vector<LayerSpec> ZooEntry::with_sparsity(double sparsity) const {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw InvalidInputError("dense sparsity must lie in [0, 1)");
  }
  std::vector<LayerSpec> result;
  result.reserve(layers.size());
  for (const LayerSpec& layer : layers) {
    if (layer.kind == LayerKind::DenseSparse) {
      result.push_back(LayerSpec::dense_sparse(
          layer.d_in, layer.d_out, sparsity_cap(layer.d_in, sparsity)));
    } else {
      result.push_back(layer);
    }
  }
  return result;
}

const std::vector<ZooEntry>& builtin_zoo() {
  static const std::vector<ZooEntry> zoo = make_zoo();
  return zoo;
}

const ZooEntry* find_zoo_entry(std::string_view name) {
  for (const ZooEntry& entry : builtin_zoo()) {
    if (entry.name == name) return &entry;
  }
  return nullptr;
}

std::string zoo_names() {
  std::string names;
  for (const ZooEntry& entry : builtin_zoo()) {
    if (!names.empty()) names += ", ";
    names += entry.name;
  }
  return names;
}

}  // namespace convbound
