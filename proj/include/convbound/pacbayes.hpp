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

#ifndef CONVBOUND_PACBAYES_HPP
#define CONVBOUND_PACBAYES_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "convbound/layer.hpp"
#include "convbound/network.hpp"

namespace convbound {

/// Ordered layer structure plus the per-layer norms the bound consumes.
/// Norms are either measured from concrete weights or assumed (the capacity
/// tables assume unit spectral norms). Conv-layer Frobenius norms are taken
/// over the free filter parameters, matching the noise's free coordinates.
struct ArchitectureSpec {
  std::string name;
  std::vector<LayerSpec> layers;
  std::vector<double> spectral_norms;   // size depth()
  std::vector<double> frobenius_norms;  // size depth()

  std::size_t depth() const { return layers.size(); }
  void validate() const;
};

struct BoundInputs {
  double margin = 1.0;          // gamma
  double input_bound = 1.0;     // B
  std::size_t sample_count = 50000;  // m
  double delta = 0.05;
  std::size_t num_classes = 10;  // k in the ln(km/delta) term

  void validate() const;
};

/// Every ingredient of the bound, for both the structured capacity
/// constants and the ambient-dimension baseline.
struct BoundBreakdown {
  double sigma = 0.0;
  double beta_tilde = 0.0;
  double kl = 0.0;
  double margin_loss = 0.0;
  double log_term = 0.0;

  std::vector<double> layer_constants;  // c_i
  double c1 = 0.0;                      // sum of c_i
  double sum_constants_squared = 0.0;   // sum of c_i^2
  double bound_argument = 0.0;  // B^2 C1^2 prod||W||^2 sum(F^2/S^2) / gamma^2
  double bound_value = 0.0;     // margin_loss + sqrt((arg + log)/ (m-1))

  std::vector<double> baseline_constants;
  double baseline_c1 = 0.0;
  double baseline_sum_constants_squared = 0.0;
  double baseline_argument = 0.0;
  double baseline_value = 0.0;
};

/// Rescale every layer to the geometric-mean spectral norm beta. ReLU
/// homogeneity keeps the network function unchanged; the product of
/// spectral norms and each Frobenius/spectral ratio are preserved.
std::pair<std::vector<Matrix>, double> normalize_weights(
    const std::vector<Matrix>& weights);

/// Network-level variant: scales operators (and conv filters) in place.
std::pair<ReluNetwork, double> normalize_network(const ReluNetwork& net);

/// Structured capacity constant of one layer for a depth-d network:
/// conv kinds   q(sqrt(a) + sqrt(b)) [+ q sqrt(2 ln(4 N^2 d))],
/// dense        2 sqrt(s)            [+ sqrt(2 ln(2 d))],
/// log terms included when with_log_terms.
double layer_constant(const LayerSpec& layer, std::size_t depth,
                      bool with_log_terms);

/// Ambient-dimension estimate sqrt(d1) + sqrt(d2) over the materialized
/// shape, with the dense-style log term when requested.
double ambient_constant(const LayerSpec& layer, std::size_t depth,
                        bool with_log_terms);

/// Noise deviation keeping the layerwise perturbation below gamma/4 with
/// probability >= 1/2:
/// sigma = gamma / (42 B beta^{d-1} [sum_conv q(sqrt a + sqrt b +
///         sqrt(2 ln(4 N^2 d))) + sum_dense (2 sqrt s + sqrt(2 ln(2d)))]).
double compute_sigma(const ArchitectureSpec& arch, const BoundInputs& inputs,
                     double beta_tilde);

/// KL divergence bound (sum of squared Frobenius norms of the free
/// parameters) / (2 sigma^2).
double kl_term(const std::vector<Matrix>& weights, double sigma);
double kl_term_from_norms(const std::vector<double>& frobenius_norms,
                          double sigma);

/// Fraction of samples whose true-class score fails to beat every other
/// class by more than gamma.
double empirical_margin_loss(const std::vector<std::vector<double>>& logits,
                             const std::vector<std::size_t>& labels,
                             double gamma);

/// Full bound evaluation. The O(1) constant is reported as 1; the breakdown
/// exposes the raw pieces. use_lemma_log_term switches the additive log
/// from ln(k m / delta) to ln(6 m / delta).
BoundBreakdown generalization_bound(const ArchitectureSpec& arch,
                                    const BoundInputs& inputs,
                                    double empirical_margin_loss,
                                    bool with_log_terms = true,
                                    bool use_lemma_log_term = false);

/// Multiplicative grid over [(gamma/2B)^{1/d}, (gamma sqrt(m)/2B)^{1/d}]
/// with ratio (1 + 1/d): every beta in the range has a grid point within
/// beta/d, and the size stays within ceil(d m^{1/(2d)}) + 1.
std::vector<double> beta_grid_cover(double gamma, double input_bound,
                                    std::size_t depth, std::size_t m);

/// ArchitectureSpec of a concrete network, with measured spectral norms and
/// free-parameter Frobenius norms.
ArchitectureSpec architecture_of(const ReluNetwork& net,
                                 const std::string& name = "network");

}  // namespace convbound

#endif  // CONVBOUND_PACBAYES_HPP
