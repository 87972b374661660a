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

#include "convbound/commands.hpp"

#include <cmath>

#include "convbound/errors.hpp"
#include "convbound/version.hpp"
#include "convbound/zoo.hpp"

namespace convbound {

namespace {

constexpr std::uint64_t kLemmaStreamTag = 0x30;
constexpr std::uint64_t kSigmaStreamTag = 0x40;

void stamp(ExperimentReport& report, const std::string& command) {
  report.add_metadata("artifact", std::string("convbound ") + kVersion);
  report.add_metadata("command", command);
}

std::string join_sizes(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t v : values) {
    if (!out.empty()) out += ' ';
    out += std::to_string(v);
  }
  return out;
}

std::size_t sparse_cap_for(std::size_t columns, double sparsity) {
  const double kept = (1.0 - sparsity) * static_cast<double>(columns);
  return std::max<std::size_t>(1,
                               static_cast<std::size_t>(std::llround(kept)));
}

}  // namespace

ExperimentReport cmd_figure3(const Figure3Options& options) {
  const RngStream root(options.seed);
  ExperimentReport report({"kind", "channels", "trials", "empirical_mean",
                           "empirical_min", "empirical_max", "empirical_std",
                           "spread", "theory_threshold", "bvh_threshold"});
  stamp(report, "figure3");
  report.add_metadata("channels", join_sizes(options.channels));
  report.add_metadata("filter_size", std::to_string(options.filter_size));
  report.add_metadata("map_size", std::to_string(options.map_size));
  report.add_metadata("spatial_dims", std::to_string(options.spatial_dims));
  report.add_metadata("sigma", format_double(options.sigma));
  report.add_metadata("trials", std::to_string(options.trials));
  report.add_metadata("seed", std::to_string(options.seed));

  const LayerKind kinds[] = {LayerKind::ConvLike, LayerKind::Conv};
  for (std::size_t k = 0; k < 2; ++k) {
    const ExperimentReport sweep = channel_sweep(
        kinds[k], options.spatial_dims, options.filter_size, options.map_size,
        options.channels, options.sigma, options.trials, root.substream(k),
        options.threads);
    for (const auto& row : sweep.rows()) {
      report.add_row(row);
    }
  }
  report.set_plot_kind("figure3");
  return report;
}

ExperimentReport cmd_figure4(const std::string& zoo_name, double sparsity) {
  const ZooEntry* entry = find_zoo_entry(zoo_name);
  if (entry == nullptr) {
    throw InvalidInputError("unknown architecture '" + zoo_name +
                            "'; available: " + zoo_names());
  }
  return cmd_figure4(entry->with_sparsity(sparsity), entry->name, sparsity);
}

ExperimentReport cmd_figure4(const std::vector<LayerSpec>& layers,
                             const std::string& name, double sparsity) {
  if (layers.empty()) throw InvalidInputError("figure4: no layers");
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    throw InvalidInputError("figure4: sparsity must lie in [0, 1)");
  }

  ExperimentReport report(
      {"layer", "kind", "rows", "cols", "c2_ambient", "c2_sparse",
       "c2_convlike", "c2_conv", "log10_ambient", "log10_sparse",
       "log10_convlike", "log10_conv"});
  stamp(report, "figure4");
  report.add_metadata("architecture", name);
  report.add_metadata("sparsity", format_double(sparsity));

  const std::size_t depth = layers.size();
  for (std::size_t i = 0; i < depth; ++i) {
    const LayerSpec& layer = layers[i];
    const double ambient = ambient_constant(layer, depth, false);
    // The sparse estimate compresses the materialized layer to the given
    // sparsity regardless of its kind.
    const std::size_t cap = layer.kind == LayerKind::DenseSparse
                                ? layer.sparsity
                                : sparse_cap_for(layer.cols(), sparsity);
    const double sparse = 2.0 * std::sqrt(static_cast<double>(cap));

    std::vector<std::string> row{
        std::to_string(i),
        layer_kind_name(layer.kind),
        std::to_string(layer.rows()),
        std::to_string(layer.cols()),
        format_double(ambient * ambient),
        format_double(sparse * sparse),
    };
    if (layer.is_conv_kind()) {
      // Same formula for both structured estimates; conv tails only differ
      // in concentration, not in the leading constant.
      const double structured = layer_constant(layer, depth, false);
      row.push_back(format_double(structured * structured));
      row.push_back(format_double(structured * structured));
      row.push_back(format_double(2.0 * std::log10(ambient)));
      row.push_back(format_double(2.0 * std::log10(sparse)));
      row.push_back(format_double(2.0 * std::log10(structured)));
      row.push_back(format_double(2.0 * std::log10(structured)));
    } else {
      row.push_back("");
      row.push_back("");
      row.push_back(format_double(2.0 * std::log10(ambient)));
      row.push_back(format_double(2.0 * std::log10(sparse)));
      row.push_back("");
      row.push_back("");
    }
    report.add_row(std::move(row));
  }
  report.set_plot_kind("figure4");
  return report;
}

ExperimentReport cmd_table1(double gamma, std::size_t sample_count,
                            double delta, bool with_log_terms) {
  if (!(gamma > 0.0)) throw InvalidInputError("table1: gamma must be positive");
  if (sample_count < 2) throw InvalidInputError("table1: m must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidInputError("table1: delta must lie in (0, 1)");
  }

  ExperimentReport report({"architecture", "depth", "log10_ours",
                           "log10_baseline", "log10_c1sq_ours",
                           "log10_c1sq_baseline", "capacity_ours",
                           "capacity_baseline", "bound_ours",
                           "bound_baseline"});
  stamp(report, "table1");
  report.add_metadata("gamma", format_double(gamma));
  report.add_metadata("m", std::to_string(sample_count));
  report.add_metadata("delta", format_double(delta));
  report.add_metadata("log_terms", with_log_terms ? "true" : "false");

  const double m = static_cast<double>(sample_count);
  for (const ZooEntry& entry : builtin_zoo()) {
    const std::vector<LayerSpec> layers =
        entry.with_sparsity(entry.default_dense_sparsity);
    const std::size_t depth = layers.size();
    double sum_sq = 0.0;
    double baseline_sum_sq = 0.0;
    double c1 = 0.0;
    double baseline_c1 = 0.0;
    for (const LayerSpec& layer : layers) {
      const double c = layer_constant(layer, depth, with_log_terms);
      const double ambient = ambient_constant(layer, depth, with_log_terms);
      sum_sq += c * c;
      baseline_sum_sq += ambient * ambient;
      c1 += c;
      baseline_c1 += ambient;
    }
    const std::size_t classes = layers.back().rows();
    const double log_term =
        std::log(static_cast<double>(classes) * m / delta);
    const double bound_ours =
        std::sqrt((sum_sq / (gamma * gamma) + log_term) / (m - 1.0));
    const double bound_baseline =
        std::sqrt((baseline_sum_sq / (gamma * gamma) + log_term) / (m - 1.0));

    report.add_row({entry.name, std::to_string(depth),
                    format_double(std::log10(sum_sq)),
                    format_double(std::log10(baseline_sum_sq)),
                    format_double(2.0 * std::log10(c1)),
                    format_double(2.0 * std::log10(baseline_c1)),
                    format_double(sum_sq), format_double(baseline_sum_sq),
                    format_double(bound_ours),
                    format_double(bound_baseline)});
  }
  return report;
}

ValidateOutcome cmd_validate(const ParsedConfig& config) {
  const ReluNetwork net = build_network(config);
  const std::vector<std::vector<double>> probes = config_probe_inputs(config);
  const RngStream root(config.options.seed);

  const ArchitectureSpec arch = architecture_of(net, config.name);
  double beta = 0.0;
  for (double n : arch.spectral_norms) beta += std::log(n);
  beta = std::exp(beta / static_cast<double>(arch.depth()));
  const double stability_sigma = compute_sigma(arch, config.bound, beta);
  const double lemma_sigma = config.options.sigma.value_or(stability_sigma);

  const PerturbationCheck lemma = check_perturbation_lemma(
      net, probes, lemma_sigma, config.options.trials,
      root.substream(kLemmaStreamTag), config.options.threads);
  const SigmaConditionCheck stability = check_sigma_condition(
      net, probes, config.bound.margin, config.options.trials,
      root.substream(kSigmaStreamTag), config.options.threads);

  ExperimentReport report({"check", "metric", "value"});
  stamp(report, "validate");
  report.add_metadata("config", config.name);
  report.add_metadata("seed", std::to_string(config.options.seed));
  report.add_metadata("trials", std::to_string(config.options.trials));
  report.add_metadata("probes", std::to_string(probes.size()));

  report.add_row({"network", "depth", std::to_string(net.depth())});
  report.add_row({"network", "input_bound",
                  format_double(net.input_bound)});
  report.add_row({"network", "beta", format_double(beta)});

  report.add_row({"perturbation_lemma", "sigma", format_double(lemma_sigma)});
  report.add_row({"perturbation_lemma", "trials",
                  std::to_string(lemma.trials)});
  report.add_row({"perturbation_lemma", "violations",
                  std::to_string(lemma.violations)});
  report.add_row({"perturbation_lemma", "max_ratio",
                  format_double(lemma.max_ratio)});
  report.add_row({"perturbation_lemma", "resamples",
                  std::to_string(lemma.total_resamples)});

  report.add_row({"sigma_condition", "sigma",
                  format_double(stability.sigma)});
  report.add_row({"sigma_condition", "gamma_over_4",
                  format_double(stability.gamma / 4.0)});
  report.add_row({"sigma_condition", "trials",
                  std::to_string(stability.trials)});
  report.add_row({"sigma_condition", "frequency_unconditioned",
                  format_double(stability.frequency)});
  report.add_row({"sigma_condition", "frequency_conditioned",
                  format_double(stability.conditioned_frequency)});
  report.add_row({"sigma_condition", "conditioned_trials",
                  std::to_string(stability.conditioned_trials)});
  report.add_row({"sigma_condition", "frequency_sigma_x2",
                  format_double(stability.doubled_sigma_frequency)});

  ValidateOutcome outcome{std::move(report), false, lemma.violations,
                          stability.frequency};
  outcome.passed = lemma.violations == 0 && stability.frequency >= 0.5;
  outcome.report.add_row(
      {"summary", "passed", outcome.passed ? "1" : "0"});
  return outcome;
}

ExperimentReport cmd_bound(const ParsedConfig& config, double margin_loss,
                           bool use_lemma_log_term) {
  ArchitectureSpec arch = config.arch;
  if (arch.spectral_norms.empty()) {
    arch.spectral_norms.assign(arch.depth(), 1.0);
  }
  if (arch.frobenius_norms.empty()) {
    arch.frobenius_norms.assign(arch.depth(), 1.0);
  }
  const BoundBreakdown breakdown = generalization_bound(
      arch, config.bound, margin_loss, /*with_log_terms=*/true,
      use_lemma_log_term);

  ExperimentReport report({"item", "value"});
  stamp(report, "bound");
  report.add_metadata("config", config.name);
  report.add_row({"margin_loss", format_double(breakdown.margin_loss)});
  report.add_row({"sigma", format_double(breakdown.sigma)});
  report.add_row({"beta_tilde", format_double(breakdown.beta_tilde)});
  report.add_row({"kl", format_double(breakdown.kl)});
  report.add_row({"log_term", format_double(breakdown.log_term)});
  report.add_row({"c1", format_double(breakdown.c1)});
  report.add_row({"sum_c_squared",
                  format_double(breakdown.sum_constants_squared)});
  report.add_row({"bound_argument",
                  format_double(breakdown.bound_argument)});
  report.add_row({"bound_value", format_double(breakdown.bound_value)});
  report.add_row({"baseline_c1", format_double(breakdown.baseline_c1)});
  report.add_row({"baseline_argument",
                  format_double(breakdown.baseline_argument)});
  report.add_row({"baseline_value",
                  format_double(breakdown.baseline_value)});
  for (std::size_t i = 0; i < breakdown.layer_constants.size(); ++i) {
    report.add_row({"layer_" + std::to_string(i) + "_constant",
                    format_double(breakdown.layer_constants[i])});
  }
  return report;
}

ExperimentReport cmd_mc(const LayerSpec& spec, double sigma,
                        std::size_t trials, std::uint64_t seed, int threads) {
  const McSummary summary =
      mc_spectral_norm(spec, sigma, trials, RngStream(seed), threads);

  TailBound bound;
  switch (spec.kind) {
    case LayerKind::DenseSparse:
      bound = bound_sparse(spec.sparsity, sigma);
      break;
    case LayerKind::ConvLike:
      bound = bound_convlike(spec.in_channels, spec.out_channels,
                             spec.filter_size, sigma);
      break;
    case LayerKind::Conv:
      bound = bound_conv(spec.in_channels, spec.out_channels,
                         spec.filter_size, spec.map_size, sigma,
                         /*use_appendix_constant=*/true, spec.spatial_dims);
      break;
  }

  ExperimentReport report({"metric", "value"});
  stamp(report, "mc");
  report.add_metadata("layer", spec.describe());
  report.add_metadata("sigma", format_double(sigma));
  report.add_metadata("seed", std::to_string(seed));
  report.add_metadata("bound", bound.description);
  report.add_row({"trials", std::to_string(summary.trials)});
  report.add_row({"mean", format_double(summary.mean)});
  report.add_row({"min", format_double(summary.min)});
  report.add_row({"max", format_double(summary.max)});
  report.add_row({"stddev", format_double(summary.stddev)});
  for (double t : kDefaultProbeOffsets) {
    const double level = bound.threshold(t);
    const std::size_t exceed = summary.exceed_count(level);
    const std::string suffix = "_t" + format_double(t);
    report.add_row({"threshold" + suffix, format_double(level)});
    report.add_row({"tail" + suffix, format_double(bound.tail_prob(t))});
    report.add_row({"exceed" + suffix, std::to_string(exceed)});
    report.add_row(
        {"exceed_frequency" + suffix,
         format_double(static_cast<double>(exceed) /
                       static_cast<double>(summary.trials))});
  }
  return report;
}

}  // namespace convbound
