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

#include "convbound/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "convbound/errors.hpp"

namespace convbound {

namespace {

using Json = nlohmann::ordered_json;

// Stream tags for deriving independent sub-generators from the config seed.
constexpr std::uint64_t kWeightStreamTag = 0x10;
constexpr std::uint64_t kProbeStreamTag = 0x20;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ParseError("config field '" + path + "': " + message);
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

void reject_unknown(const Json& object, const std::string& path,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

template <typename T>
T get_number(const Json& object, const std::string& path, const char* key,
             T fallback, bool required = false) {
  if (!object.contains(key)) {
    if (required) fail(join(path, key), "missing required field");
    return fallback;
  }
  const Json& value = object.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!value.is_boolean()) fail(join(path, key), "expected a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_integer() && !value.is_number_unsigned()) {
      fail(join(path, key), "expected an integer");
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (value.is_number_integer() && value.template get<long long>() < 0) {
        fail(join(path, key), "expected a non-negative integer");
      }
    }
  } else {
    if (!value.is_number()) fail(join(path, key), "expected a number");
  }
  return value.template get<T>();
}

LayerSpec parse_layer(const Json& layer, std::size_t index) {
  const std::string path = "layers[" + std::to_string(index) + "]";
  if (!layer.is_object()) fail(path, "expected an object");
  if (!layer.contains("kind")) fail(path + ".kind", "missing required field");
  if (!layer.at("kind").is_string()) fail(path + ".kind", "expected a string");
  const std::string kind = layer.at("kind").get<std::string>();

  try {
    if (kind == "dense_sparse") {
      reject_unknown(layer, path, {"kind", "d_in", "d_out", "s"});
      return LayerSpec::dense_sparse(
          get_number<std::size_t>(layer, path, "d_in", 0, true),
          get_number<std::size_t>(layer, path, "d_out", 0, true),
          get_number<std::size_t>(layer, path, "s", 0, true));
    }
    if (kind == "convlike" || kind == "conv") {
      reject_unknown(layer, path,
                     {"kind", "in_channels", "out_channels", "filter_size",
                      "map_size", "spatial_dims"});
      const auto a =
          get_number<std::size_t>(layer, path, "in_channels", 0, true);
      const auto b =
          get_number<std::size_t>(layer, path, "out_channels", 0, true);
      const auto q =
          get_number<std::size_t>(layer, path, "filter_size", 0, true);
      const auto n = get_number<std::size_t>(layer, path, "map_size", 0, true);
      const auto dims = get_number<int>(layer, path, "spatial_dims", 2);
      return kind == "conv" ? LayerSpec::conv(a, b, q, n, dims)
                            : LayerSpec::conv_like(a, b, q, n, dims);
    }
  } catch (const InvalidInputError& e) {
    fail(path, e.what());
  }
  fail(path + ".kind",
       "unknown layer kind '" + kind +
           "' (expected dense_sparse, convlike, or conv)");
}

std::vector<double> parse_number_array(const Json& value,
                                       const std::string& path) {
  if (!value.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value.at(i).is_number()) {
      fail(path + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back(value.at(i).get<double>());
  }
  return out;
}

ParsedConfig parse_document(const Json& doc) {
  if (!doc.is_object()) throw ParseError("config root must be an object");
  reject_unknown(doc, "",
                 {"schema_version", "name", "layers", "bound", "norms",
                  "weights", "options"});

  ParsedConfig config;
  config.schema_version =
      get_number<int>(doc, "", "schema_version", 0, /*required=*/true);
  if (config.schema_version != kConfigSchemaVersion) {
    fail("schema_version", "unsupported version " +
                               std::to_string(config.schema_version) +
                               " (this build reads version " +
                               std::to_string(kConfigSchemaVersion) + ")");
  }
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) fail("name", "expected a string");
    config.name = doc.at("name").get<std::string>();
  }

  if (!doc.contains("layers")) fail("layers", "missing required field");
  const Json& layers = doc.at("layers");
  if (!layers.is_array() || layers.empty()) {
    fail("layers", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    config.arch.layers.push_back(parse_layer(layers.at(i), i));
  }
  config.arch.name = config.name;

  // Materialized shapes must chain.
  for (std::size_t i = 0; i + 1 < config.arch.layers.size(); ++i) {
    const LayerSpec& cur = config.arch.layers[i];
    const LayerSpec& next = config.arch.layers[i + 1];
    if (next.cols() != cur.rows()) {
      fail("layers", "layer " + std::to_string(i) + " (" + cur.describe() +
                         ") and layer " + std::to_string(i + 1) + " (" +
                         next.describe() + ") do not compose: " +
                         std::to_string(cur.rows()) + " outputs vs " +
                         std::to_string(next.cols()) + " inputs");
    }
  }

  config.bound.num_classes = config.arch.layers.back().rows();
  if (doc.contains("bound")) {
    const Json& bound = doc.at("bound");
    if (!bound.is_object()) fail("bound", "expected an object");
    reject_unknown(bound, "bound", {"gamma", "B", "m", "delta", "classes"});
    config.bound.margin = get_number<double>(bound, "bound", "gamma",
                                             config.bound.margin);
    config.bound.input_bound =
        get_number<double>(bound, "bound", "B", config.bound.input_bound);
    config.bound.sample_count = get_number<std::size_t>(
        bound, "bound", "m", config.bound.sample_count);
    config.bound.delta =
        get_number<double>(bound, "bound", "delta", config.bound.delta);
    config.bound.num_classes = get_number<std::size_t>(
        bound, "bound", "classes", config.bound.num_classes);
  }
  try {
    config.bound.validate();
  } catch (const InvalidInputError& e) {
    fail("bound", e.what());
  }

  if (doc.contains("norms")) {
    const Json& norms = doc.at("norms");
    if (!norms.is_object()) fail("norms", "expected an object");
    reject_unknown(norms, "norms", {"spectral", "frobenius"});
    if (norms.contains("spectral")) {
      config.arch.spectral_norms =
          parse_number_array(norms.at("spectral"), "norms.spectral");
    }
    if (norms.contains("frobenius")) {
      config.arch.frobenius_norms =
          parse_number_array(norms.at("frobenius"), "norms.frobenius");
    }
  }

  if (doc.contains("weights")) {
    const Json& weights = doc.at("weights");
    if (!weights.is_array() ||
        weights.size() != config.arch.layers.size()) {
      fail("weights", "expected one array of values per layer");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
      const std::string path = "weights[" + std::to_string(i) + "]";
      std::vector<double> values = parse_number_array(weights.at(i), path);
      const std::size_t expected = config.arch.layers[i].free_parameters();
      if (values.size() != expected) {
        fail(path, "layer " + config.arch.layers[i].describe() + " needs " +
                       std::to_string(expected) + " values, got " +
                       std::to_string(values.size()));
      }
      config.weights.push_back(std::move(values));
    }
  }

  if (doc.contains("options")) {
    const Json& options = doc.at("options");
    if (!options.is_object()) fail("options", "expected an object");
    reject_unknown(options, "options",
                   {"seed", "trials", "sigma", "normalize", "threads"});
    config.options.seed = get_number<std::uint64_t>(options, "options", "seed",
                                                    config.options.seed);
    config.options.trials = get_number<std::size_t>(
        options, "options", "trials", config.options.trials);
    if (options.contains("sigma")) {
      const double sigma =
          get_number<double>(options, "options", "sigma", 0.0);
      if (!(sigma > 0.0)) fail("options.sigma", "expected a positive number");
      config.options.sigma = sigma;
    }
    config.options.normalize = get_number<bool>(options, "options",
                                                "normalize",
                                                config.options.normalize);
    config.options.threads =
        get_number<int>(options, "options", "threads", config.options.threads);
    if (config.options.threads < 1) {
      fail("options.threads", "expected a positive integer");
    }
    if (config.options.trials == 0) {
      fail("options.trials", "expected a positive integer");
    }
  }

  try {
    config.arch.validate();
  } catch (const InvalidInputError& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return config;
}

}  // namespace

ParsedConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_document(doc);
}

ParsedConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string canonical_config(const ParsedConfig& config) {
  Json doc;
  doc["schema_version"] = config.schema_version;
  doc["name"] = config.name;
  doc["layers"] = Json::array();
  for (const LayerSpec& layer : config.arch.layers) {
    Json entry;
    if (layer.kind == LayerKind::DenseSparse) {
      entry["kind"] = "dense_sparse";
      entry["d_in"] = layer.d_in;
      entry["d_out"] = layer.d_out;
      entry["s"] = layer.sparsity;
    } else {
      entry["kind"] = layer_kind_name(layer.kind);
      entry["in_channels"] = layer.in_channels;
      entry["out_channels"] = layer.out_channels;
      entry["filter_size"] = layer.filter_size;
      entry["map_size"] = layer.map_size;
      entry["spatial_dims"] = layer.spatial_dims;
    }
    doc["layers"].push_back(std::move(entry));
  }
  doc["bound"] = {{"gamma", config.bound.margin},
                  {"B", config.bound.input_bound},
                  {"m", config.bound.sample_count},
                  {"delta", config.bound.delta},
                  {"classes", config.bound.num_classes}};
  if (!config.arch.spectral_norms.empty() ||
      !config.arch.frobenius_norms.empty()) {
    Json norms;
    if (!config.arch.spectral_norms.empty()) {
      norms["spectral"] = config.arch.spectral_norms;
    }
    if (!config.arch.frobenius_norms.empty()) {
      norms["frobenius"] = config.arch.frobenius_norms;
    }
    doc["norms"] = std::move(norms);
  }
  if (config.has_weights()) doc["weights"] = config.weights;
  Json options;
  options["seed"] = config.options.seed;
  options["trials"] = config.options.trials;
  if (config.options.sigma) options["sigma"] = *config.options.sigma;
  options["normalize"] = config.options.normalize;
  options["threads"] = config.options.threads;
  doc["options"] = std::move(options);
  return doc.dump(2) + "\n";
}

ReluNetwork build_network(const ParsedConfig& config) {
  std::vector<StructuredOperator> layers;
  layers.reserve(config.arch.layers.size());
  RngStream weight_rng =
      RngStream(config.options.seed).substream(kWeightStreamTag);
  for (std::size_t i = 0; i < config.arch.layers.size(); ++i) {
    const LayerSpec& spec = config.arch.layers[i];
    if (config.has_weights()) {
      layers.push_back(spec.kind == LayerKind::Conv
                           ? materialize_conv(spec, config.weights[i])
                           : materialize_on_mask(spec, config.weights[i]));
    } else {
      RngStream layer_rng = weight_rng.substream(i);
      layers.push_back(sample_perturbation(spec, 1.0, layer_rng));
    }
  }
  ReluNetwork net(std::move(layers), config.bound.input_bound);
  if (config.options.normalize) {
    net = normalize_network(net).first;
  }
  return net;
}

std::vector<std::vector<double>> config_probe_inputs(
    const ParsedConfig& config, std::size_t count) {
  const std::size_t dim = config.arch.layers.front().cols();
  return probe_inputs(count, dim, config.bound.input_bound,
                      RngStream(config.options.seed).substream(
                          kProbeStreamTag));
}

}  // namespace convbound
