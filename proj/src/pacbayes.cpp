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

#include "convbound/pacbayes.hpp"

#include <algorithm>
#include <cmath>

#include "convbound/errors.hpp"

namespace convbound {

void ArchitectureSpec::validate() const {
  if (layers.empty()) {
    throw InvalidInputError("architecture needs at least one layer");
  }
  for (const LayerSpec& layer : layers) layer.validate();
  if (!spectral_norms.empty() && spectral_norms.size() != layers.size()) {
    throw InvalidInputError("spectral norm count does not match layer count");
  }
  if (!frobenius_norms.empty() && frobenius_norms.size() != layers.size()) {
    throw InvalidInputError("frobenius norm count does not match layer count");
  }
  for (double v : spectral_norms) {
    if (!(v > 0.0)) throw InvalidInputError("spectral norms must be positive");
  }
  for (double v : frobenius_norms) {
    if (!(v > 0.0)) {
      throw InvalidInputError("frobenius norms must be positive");
    }
  }
}

void BoundInputs::validate() const {
  if (!(margin > 0.0)) throw InvalidInputError("margin gamma must be positive");
  if (!(input_bound > 0.0)) {
    throw InvalidInputError("input bound B must be positive");
  }
  if (sample_count < 2) {
    throw InvalidInputError("sample count m must be >= 2");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidInputError("delta must lie in (0, 1)");
  }
  if (num_classes == 0) {
    throw InvalidInputError("class count must be >= 1");
  }
}

std::pair<std::vector<Matrix>, double> normalize_weights(
    const std::vector<Matrix>& weights) {
  if (weights.empty()) {
    throw InvalidInputError("normalize_weights: no layers");
  }
  std::vector<double> norms;
  norms.reserve(weights.size());
  double log_sum = 0.0;
  for (const Matrix& w : weights) {
    const double norm = spectral_norm(w, 1e-12);
    if (norm == 0.0) {
      throw InvalidInputError("normalize_weights: zero layer");
    }
    norms.push_back(norm);
    log_sum += std::log(norm);
  }
  const double beta = std::exp(log_sum / static_cast<double>(weights.size()));
  std::vector<Matrix> normalized = weights;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    normalized[i] *= beta / norms[i];
  }
  return {std::move(normalized), beta};
}

std::pair<ReluNetwork, double> normalize_network(const ReluNetwork& net) {
  if (net.layers.empty()) {
    throw InvalidInputError("normalize_network: empty network");
  }
  std::vector<double> norms = layer_spectral_norms(net);
  double log_sum = 0.0;
  for (double n : norms) {
    if (n == 0.0) throw InvalidInputError("normalize_network: zero layer");
    log_sum += std::log(n);
  }
  const double beta =
      std::exp(log_sum / static_cast<double>(net.layers.size()));
  ReluNetwork normalized = net;
  for (std::size_t i = 0; i < normalized.layers.size(); ++i) {
    normalized.layers[i].scale(beta / norms[i]);
  }
  return {std::move(normalized), beta};
}

double layer_constant(const LayerSpec& layer, std::size_t depth,
                      bool with_log_terms) {
  if (depth == 0) throw InvalidInputError("layer_constant: depth must be >= 1");
  const double d = static_cast<double>(depth);
  if (layer.is_conv_kind()) {
    const double q = static_cast<double>(layer.filter_size);
    const double n = static_cast<double>(layer.map_size);
    double c = q * (std::sqrt(static_cast<double>(layer.in_channels)) +
                    std::sqrt(static_cast<double>(layer.out_channels)));
    if (with_log_terms) c += q * std::sqrt(2.0 * std::log(4.0 * n * n * d));
    return c;
  }
  double c = 2.0 * std::sqrt(static_cast<double>(layer.sparsity));
  if (with_log_terms) c += std::sqrt(2.0 * std::log(2.0 * d));
  return c;
}

double ambient_constant(const LayerSpec& layer, std::size_t depth,
                        bool with_log_terms) {
  if (depth == 0) {
    throw InvalidInputError("ambient_constant: depth must be >= 1");
  }
  double c = std::sqrt(static_cast<double>(layer.rows())) +
             std::sqrt(static_cast<double>(layer.cols()));
  if (with_log_terms) {
    c += std::sqrt(2.0 * std::log(2.0 * static_cast<double>(depth)));
  }
  return c;
}

double compute_sigma(const ArchitectureSpec& arch, const BoundInputs& inputs,
                     double beta_tilde) {
  arch.validate();
  inputs.validate();
  if (!(beta_tilde > 0.0)) {
    throw InvalidInputError("compute_sigma: beta must be positive");
  }
  const std::size_t d = arch.depth();
  double capacity = 0.0;
  for (const LayerSpec& layer : arch.layers) {
    capacity += layer_constant(layer, d, /*with_log_terms=*/true);
  }
  return inputs.margin /
         (42.0 * inputs.input_bound *
          std::pow(beta_tilde, static_cast<double>(d) - 1.0) * capacity);
}

double kl_term(const std::vector<Matrix>& weights, double sigma) {
  if (sigma <= 0.0) throw InvalidInputError("kl_term: sigma must be positive");
  double sum_sq = 0.0;
  for (const Matrix& w : weights) {
    const double f = frobenius_norm(w);
    sum_sq += f * f;
  }
  return sum_sq / (2.0 * sigma * sigma);
}

double kl_term_from_norms(const std::vector<double>& frobenius_norms,
                          double sigma) {
  if (sigma <= 0.0) throw InvalidInputError("kl_term: sigma must be positive");
  double sum_sq = 0.0;
  for (double f : frobenius_norms) sum_sq += f * f;
  return sum_sq / (2.0 * sigma * sigma);
}

double empirical_margin_loss(const std::vector<std::vector<double>>& logits,
                             const std::vector<std::size_t>& labels,
                             double gamma) {
  if (logits.size() != labels.size()) {
    throw InvalidInputError("margin loss: logit/label count mismatch");
  }
  if (logits.empty()) {
    throw InvalidInputError("margin loss: no samples");
  }
  if (gamma < 0.0) {
    throw InvalidInputError("margin loss: gamma must be >= 0");
  }
  std::size_t failures = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const auto& scores = logits[i];
    const std::size_t label = labels[i];
    if (label >= scores.size()) {
      throw InvalidInputError("margin loss: label out of range at sample " +
                              std::to_string(i));
    }
    double best_other = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < scores.size(); ++c) {
      if (c != label) best_other = std::max(best_other, scores[c]);
    }
    // Single-class scores have no competitor and always clear the margin.
    if (scores.size() > 1 && scores[label] <= gamma + best_other) {
      failures += 1;
    }
  }
  return static_cast<double>(failures) / static_cast<double>(logits.size());
}

BoundBreakdown generalization_bound(const ArchitectureSpec& arch,
                                    const BoundInputs& inputs,
                                    double margin_loss, bool with_log_terms,
                                    bool use_lemma_log_term) {
  arch.validate();
  inputs.validate();
  if (!(margin_loss >= 0.0 && margin_loss <= 1.0)) {
    throw InvalidInputError("margin loss must lie in [0, 1]");
  }
  if (arch.spectral_norms.size() != arch.depth() ||
      arch.frobenius_norms.size() != arch.depth()) {
    throw InvalidInputError(
        "generalization_bound needs per-layer spectral and frobenius norms");
  }

  const std::size_t d = arch.depth();
  BoundBreakdown out;
  out.margin_loss = margin_loss;

  double log_prod_spec = 0.0;
  double sum_ratio = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double s = arch.spectral_norms[i];
    const double f = arch.frobenius_norms[i];
    log_prod_spec += std::log(s);
    sum_ratio += (f * f) / (s * s);
  }
  out.beta_tilde = std::exp(log_prod_spec / static_cast<double>(d));
  const double prod_spec_sq = std::exp(2.0 * log_prod_spec);

  for (const LayerSpec& layer : arch.layers) {
    const double c = layer_constant(layer, d, with_log_terms);
    const double ambient = ambient_constant(layer, d, with_log_terms);
    out.layer_constants.push_back(c);
    out.baseline_constants.push_back(ambient);
    out.c1 += c;
    out.baseline_c1 += ambient;
    out.sum_constants_squared += c * c;
    out.baseline_sum_constants_squared += ambient * ambient;
  }

  const double b_sq = inputs.input_bound * inputs.input_bound;
  const double gamma_sq = inputs.margin * inputs.margin;
  const double m = static_cast<double>(inputs.sample_count);
  out.log_term =
      use_lemma_log_term
          ? std::log(6.0 * m / inputs.delta)
          : std::log(static_cast<double>(inputs.num_classes) * m /
                     inputs.delta);

  out.bound_argument =
      b_sq * out.c1 * out.c1 * prod_spec_sq * sum_ratio / gamma_sq;
  out.bound_value =
      margin_loss + std::sqrt((out.bound_argument + out.log_term) / (m - 1.0));

  out.baseline_argument = b_sq * out.baseline_c1 * out.baseline_c1 *
                          prod_spec_sq * sum_ratio / gamma_sq;
  out.baseline_value =
      margin_loss +
      std::sqrt((out.baseline_argument + out.log_term) / (m - 1.0));

  out.sigma = compute_sigma(arch, inputs, out.beta_tilde);
  out.kl = kl_term_from_norms(arch.frobenius_norms, out.sigma);
  return out;
}

std::vector<double> beta_grid_cover(double gamma, double input_bound,
                                    std::size_t depth, std::size_t m) {
  if (!(gamma > 0.0) || !(input_bound > 0.0)) {
    throw InvalidInputError("beta_grid_cover: gamma and B must be positive");
  }
  if (depth == 0 || m == 0) {
    throw InvalidInputError("beta_grid_cover: depth and m must be >= 1");
  }
  const double inv_d = 1.0 / static_cast<double>(depth);
  const double low = std::pow(gamma / (2.0 * input_bound), inv_d);
  const double high =
      std::pow(gamma * std::sqrt(static_cast<double>(m)) / (2.0 * input_bound),
               inv_d);
  const double ratio = 1.0 + inv_d;

  std::vector<double> grid;
  double point = low;
  grid.push_back(point);
  while (point < high) {
    point *= ratio;
    grid.push_back(point);
  }
  return grid;
}

ArchitectureSpec architecture_of(const ReluNetwork& net,
                                 const std::string& name) {
  ArchitectureSpec arch;
  arch.name = name;
  for (const StructuredOperator& layer : net.layers) {
    arch.layers.push_back(layer.spec);
    arch.frobenius_norms.push_back(layer.free_frobenius_norm());
  }
  arch.spectral_norms = layer_spectral_norms(net);
  arch.validate();
  return arch;
}

}  // namespace convbound
