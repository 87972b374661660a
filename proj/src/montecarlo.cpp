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

#include "convbound/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convbound/errors.hpp"
#include "convbound/fourier.hpp"
#include "convbound/pacbayes.hpp"
#include "parallel.hpp"

namespace convbound {

namespace {

double operator_norm(const StructuredOperator& op) {
  return op.spec.kind == LayerKind::Conv ? conv_spectral_norm_fft(op)
                                         : spectral_norm(op.matrix);
}

McSummary summarize(std::vector<double> norms) {
  McSummary summary;
  summary.trials = norms.size();
  summary.min = norms.front();
  summary.max = norms.front();
  double sum = 0.0;
  for (double v : norms) {
    summary.min = std::min(summary.min, v);
    summary.max = std::max(summary.max, v);
    sum += v;
  }
  summary.mean = sum / static_cast<double>(norms.size());
  double sq = 0.0;
  for (double v : norms) sq += (v - summary.mean) * (v - summary.mean);
  summary.stddev =
      norms.size() > 1
          ? std::sqrt(sq / static_cast<double>(norms.size() - 1))
          : 0.0;
  summary.norms = std::move(norms);
  return summary;
}

void check_inputs_for(const ReluNetwork& net,
                      const std::vector<std::vector<double>>& inputs,
                      const char* op) {
  if (inputs.empty()) {
    throw InvalidInputError(std::string(op) + ": no probe inputs");
  }
  for (const auto& x : inputs) {
    if (x.size() != net.input_dim()) {
      throw InvalidInputError(std::string(op) +
                              ": probe input dimension mismatch");
    }
    if (vector_norm(x) > net.input_bound * (1.0 + 1e-9)) {
      throw InvalidInputError(std::string(op) +
                              ": probe input norm exceeds the input bound");
    }
  }
}

double max_output_change(const ReluNetwork& perturbed,
                         const std::vector<std::vector<double>>& inputs,
                         const std::vector<std::vector<double>>& base_outputs) {
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::vector<double> out = forward(perturbed, inputs[i]);
    double diff_sq = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double d = out[j] - base_outputs[i][j];
      diff_sq += d * d;
    }
    worst = std::max(worst, std::sqrt(diff_sq));
  }
  return worst;
}

ReluNetwork add_perturbations(const ReluNetwork& net,
                              const std::vector<StructuredOperator>& noise) {
  ReluNetwork perturbed = net;
  for (std::size_t i = 0; i < perturbed.layers.size(); ++i) {
    perturbed.layers[i].matrix += noise[i].matrix;
  }
  return perturbed;
}

}  // namespace

std::size_t McSummary::exceed_count(double level) const {
  std::size_t count = 0;
  for (double v : norms) {
    if (v >= level) count += 1;
  }
  return count;
}

McSummary mc_spectral_norm(const LayerSpec& spec, double sigma,
                           std::size_t trials, const RngStream& rng,
                           int threads) {
  spec.validate();
  if (trials == 0) {
    throw InvalidInputError("mc_spectral_norm: trials must be >= 1");
  }
  std::vector<double> norms(trials, 0.0);
  detail::parallel_for(trials, threads, [&](std::size_t t) {
    RngStream stream = rng.substream(t);
    const StructuredOperator op = sample_perturbation(spec, sigma, stream);
    norms[t] = operator_norm(op);
  });
  return summarize(std::move(norms));
}

ExperimentReport channel_sweep(LayerKind kind, int spatial_dims,
                               std::size_t filter_size, std::size_t map_size,
                               const std::vector<std::size_t>& channel_values,
                               double sigma, std::size_t trials,
                               const RngStream& rng, int threads) {
  if (kind == LayerKind::DenseSparse) {
    throw InvalidInputError("channel_sweep applies to conv-structured kinds");
  }
  if (channel_values.empty()) {
    throw InvalidInputError("channel_sweep: empty channel list");
  }

  ExperimentReport report({"kind", "channels", "trials", "empirical_mean",
                           "empirical_min", "empirical_max", "empirical_std",
                           "spread", "theory_threshold", "bvh_threshold"});
  for (std::size_t point = 0; point < channel_values.size(); ++point) {
    const std::size_t channels = channel_values[point];
    const LayerSpec spec =
        kind == LayerKind::Conv
            ? LayerSpec::conv(channels, channels, filter_size, map_size,
                              spatial_dims)
            : LayerSpec::conv_like(channels, channels, filter_size, map_size,
                                   spatial_dims);
    const McSummary summary =
        mc_spectral_norm(spec, sigma, trials, rng.substream(point), threads);

    const TailBound theory =
        kind == LayerKind::Conv
            ? bound_conv(channels, channels, filter_size, map_size, sigma,
                         /*use_appendix_constant=*/true, spatial_dims)
            : bound_convlike(channels, channels, filter_size, sigma);
    const TailBound support_bound =
        bound_bvh(build_mask(spec), kDefaultBvhEpsilon, sigma);

    report.add_row({layer_kind_name(kind), std::to_string(channels),
                    std::to_string(summary.trials),
                    format_double(summary.mean), format_double(summary.min),
                    format_double(summary.max), format_double(summary.stddev),
                    format_double(summary.max - summary.min),
                    format_double(theory.threshold(0.0)),
                    format_double(support_bound.threshold(0.0))});
  }
  return report;
}

PerturbationCheck check_perturbation_lemma(
    const ReluNetwork& net, const std::vector<std::vector<double>>& inputs,
    double sigma, std::size_t trials, const RngStream& rng, int threads) {
  if (net.layers.empty()) {
    throw InvalidInputError("check_perturbation_lemma: empty network");
  }
  if (sigma <= 0.0) {
    throw InvalidInputError("check_perturbation_lemma: sigma must be positive");
  }
  if (trials == 0) {
    throw InvalidInputError("check_perturbation_lemma: trials must be >= 1");
  }
  check_inputs_for(net, inputs, "check_perturbation_lemma");

  const std::vector<double> norms = layer_spectral_norms(net);
  double beta = 0.0;
  for (double n : norms) beta += std::log(n);
  beta = std::exp(beta / static_cast<double>(norms.size()));
  for (double n : norms) {
    if (std::abs(n - beta) > 1e-6 * beta) {
      throw InvalidInputError(
          "check_perturbation_lemma: network is not normalized (layer "
          "spectral norms are " +
          format_double(*std::min_element(norms.begin(), norms.end())) +
          ".." +
          format_double(*std::max_element(norms.begin(), norms.end())) + ")");
    }
  }

  const std::size_t d = net.depth();
  std::vector<std::vector<double>> base_outputs;
  base_outputs.reserve(inputs.size());
  for (const auto& x : inputs) base_outputs.push_back(forward(net, x));

  const double rhs_scale =
      std::exp(2.0) * net.input_bound *
      std::pow(beta, static_cast<double>(d) - 1.0);

  PerturbationCheck result;
  result.trials = trials;
  result.lhs.assign(trials, 0.0);
  result.rhs.assign(trials, 0.0);
  std::vector<std::size_t> resamples(trials, 0);

  detail::parallel_for(trials, threads, [&](std::size_t t) {
    RngStream stream = rng.substream(t);
    std::vector<StructuredOperator> noise;
    noise.reserve(d);
    double norm_sum = 0.0;
    std::size_t rejected = 0;
    for (std::size_t layer = 0; layer < d; ++layer) {
      const double cap = norms[layer] / static_cast<double>(d);
      while (true) {
        StructuredOperator candidate =
            sample_perturbation(net.layers[layer].spec, sigma, stream);
        const double norm = operator_norm(candidate);
        if (norm <= cap) {
          norm_sum += norm;
          noise.push_back(std::move(candidate));
          break;
        }
        rejected += 1;
        if (rejected > kRejectionCapPerTrial) {
          throw ResourceError(
              "check_perturbation_lemma: more than " +
              std::to_string(kRejectionCapPerTrial) +
              " rejections in one trial; sigma is too large for the "
              "||U|| <= ||W||/d premise");
        }
      }
    }
    const ReluNetwork perturbed = add_perturbations(net, noise);
    result.lhs[t] = max_output_change(perturbed, inputs, base_outputs);
    result.rhs[t] = rhs_scale * norm_sum;
    resamples[t] = rejected;
  });

  for (std::size_t t = 0; t < trials; ++t) {
    if (result.lhs[t] > result.rhs[t]) result.violations += 1;
    if (result.rhs[t] > 0.0) {
      result.max_ratio = std::max(result.max_ratio,
                                  result.lhs[t] / result.rhs[t]);
    }
    result.total_resamples += resamples[t];
  }
  return result;
}

SigmaConditionCheck check_sigma_condition(
    const ReluNetwork& net, const std::vector<std::vector<double>>& inputs,
    double gamma, std::size_t trials, const RngStream& rng, int threads) {
  if (net.layers.empty()) {
    throw InvalidInputError("check_sigma_condition: empty network");
  }
  if (gamma <= 0.0) {
    throw InvalidInputError("check_sigma_condition: gamma must be positive");
  }
  if (trials == 0) {
    throw InvalidInputError("check_sigma_condition: trials must be >= 1");
  }
  check_inputs_for(net, inputs, "check_sigma_condition");

  const ArchitectureSpec arch = architecture_of(net);
  BoundInputs bound_inputs;
  bound_inputs.margin = gamma;
  bound_inputs.input_bound = net.input_bound;
  double beta = 0.0;
  for (double n : arch.spectral_norms) beta += std::log(n);
  beta = std::exp(beta / static_cast<double>(arch.depth()));
  const double sigma = compute_sigma(arch, bound_inputs, beta);

  const std::size_t d = net.depth();
  std::vector<std::vector<double>> base_outputs;
  base_outputs.reserve(inputs.size());
  for (const auto& x : inputs) base_outputs.push_back(forward(net, x));

  auto run_pass = [&](double noise_sigma, std::uint64_t stream_offset,
                      std::vector<char>* small_event) {
    std::vector<char> success(trials, 0);
    if (small_event) small_event->assign(trials, 0);
    detail::parallel_for(trials, threads, [&](std::size_t t) {
      RngStream stream = rng.substream(stream_offset + t);
      std::vector<StructuredOperator> noise;
      noise.reserve(d);
      bool all_small = true;
      for (std::size_t layer = 0; layer < d; ++layer) {
        noise.push_back(
            sample_perturbation(net.layers[layer].spec, noise_sigma, stream));
        if (small_event &&
            operator_norm(noise.back()) >
                arch.spectral_norms[layer] / static_cast<double>(d)) {
          all_small = false;
        }
      }
      const ReluNetwork perturbed = add_perturbations(net, noise);
      const double change =
          max_output_change(perturbed, inputs, base_outputs);
      success[t] = change <= gamma / 4.0 ? 1 : 0;
      if (small_event) (*small_event)[t] = all_small ? 1 : 0;
    });
    return success;
  };

  SigmaConditionCheck result;
  result.sigma = sigma;
  result.gamma = gamma;
  result.trials = trials;

  std::vector<char> small_event;
  const std::vector<char> success = run_pass(sigma, 0, &small_event);
  std::size_t ok = 0;
  std::size_t small = 0;
  std::size_t ok_and_small = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    ok += success[t];
    small += small_event[t];
    ok_and_small += (success[t] && small_event[t]) ? 1 : 0;
  }
  result.frequency = static_cast<double>(ok) / static_cast<double>(trials);
  result.conditioned_trials = small;
  result.conditioned_frequency =
      small > 0 ? static_cast<double>(ok_and_small) / static_cast<double>(small)
                : 0.0;

  const std::vector<char> doubled = run_pass(2.0 * sigma, trials, nullptr);
  std::size_t ok2 = 0;
  for (char c : doubled) ok2 += c;
  result.doubled_sigma_frequency =
      static_cast<double>(ok2) / static_cast<double>(trials);
  return result;
}

}  // namespace convbound
