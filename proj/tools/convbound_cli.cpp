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

// Command-line front end. Talks to the library exclusively through the
// C API in convbound.h.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convbound.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariantViolation = 1;
constexpr int kExitInputError = 2;

struct ReportDeleter {
  void operator()(cvb_report* r) const { cvb_report_free(r); }
};
struct ConfigDeleter {
  void operator()(cvb_config* c) const { cvb_config_free(c); }
};
using ReportPtr = std::unique_ptr<cvb_report, ReportDeleter>;
using ConfigPtr = std::unique_ptr<cvb_config, ConfigDeleter>;

int fail_with(cvb_status status) {
  std::cerr << "error: " << cvb_last_error() << "\n";
  return status == CVB_ERROR_INVALID_INPUT || status == CVB_ERROR_PARSE ||
                 status == CVB_ERROR_RESOURCE
             ? kExitInputError
             : kExitInvariantViolation;
}

bool write_file(const std::string& path, const char* text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    return false;
  }
  out << text;
  return out.good();
}

// Writes the CSV to --out (or stdout) and the SVG to --svg when requested.
int emit_report(const cvb_report* report, const std::string& out_path,
                const std::string& svg_path) {
  char* csv = nullptr;
  if (cvb_status s = cvb_report_csv(report, &csv); s != CVB_OK) {
    return fail_with(s);
  }
  bool ok = true;
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    ok = write_file(out_path, csv);
  }
  cvb_string_free(csv);
  if (!ok) return kExitInputError;

  if (!svg_path.empty()) {
    char* svg = nullptr;
    if (cvb_status s = cvb_report_svg(report, &svg); s != CVB_OK) {
      return fail_with(s);
    }
    ok = write_file(svg_path, svg);
    cvb_string_free(svg);
    if (!ok) return kExitInputError;
  }
  return kExitOk;
}

ConfigPtr load_config(const std::string& path, int* exit_code) {
  cvb_config* config = nullptr;
  if (cvb_status s = cvb_config_parse_file(path.c_str(), &config);
      s != CVB_OK) {
    *exit_code = fail_with(s);
    return nullptr;
  }
  *exit_code = kExitOk;
  return ConfigPtr(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral-norm concentration bounds and PAC-Bayes capacity "
               "tables for convolutional architectures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cvb_version()));

  std::string out_path;
  std::string svg_path;
  std::string config_path;
  std::uint64_t seed = 12345;
  std::int64_t trials = 100;
  std::int32_t threads = 4;

  // figure3
  auto* figure3 = app.add_subcommand(
      "figure3", "Channel sweep: empirical vs closed-form spectral norms");
  std::vector<std::int64_t> channels{1, 2, 4, 8, 16};
  std::int64_t filter_size = 5;
  std::int64_t map_size = 64;
  std::int32_t dims = 1;
  double sigma = 1.0;
  figure3->add_option("--channels", channels,
                      "Channel counts to sweep (a = b)");
  figure3->add_option("--filter-size", filter_size, "Filter side length q");
  figure3->add_option("--map-size", map_size, "Feature-map side length N");
  figure3->add_option("--dim", dims, "Spatial dimensionality (1 or 2)");
  figure3->add_option("--sigma", sigma, "Noise deviation");
  figure3->add_option("--trials", trials, "Monte Carlo trials per point");
  figure3->add_option("--seed", seed, "Master seed");
  figure3->add_option("--threads", threads, "Worker threads");
  figure3->add_option("--out", out_path, "CSV output path (default stdout)");
  figure3->add_option("--svg", svg_path, "Optional SVG plot path");

  // figure4
  auto* figure4 = app.add_subcommand(
      "figure4", "Per-layer capacity constants under the four estimates");
  std::string zoo_name;
  double sparsity = 0.9;
  figure4->add_option("--zoo", zoo_name, "Built-in architecture name");
  figure4->add_option("--config", config_path, "Architecture config file");
  figure4->add_option("--sparsity", sparsity,
                      "Zeroed fraction for the sparse estimate");
  figure4->add_option("--out", out_path, "CSV output path (default stdout)");
  figure4->add_option("--svg", svg_path, "Optional SVG plot path");

  // table1
  auto* table1 = app.add_subcommand(
      "table1", "Capacity orders of magnitude for the built-in zoo");
  double gamma = 1.0;
  std::int64_t samples = 50000;
  double delta = 0.05;
  bool no_log_terms = false;
  table1->add_option("--gamma", gamma, "Margin");
  table1->add_option("--m", samples, "Training-set size");
  table1->add_option("--delta", delta, "Confidence parameter");
  table1->add_flag("--no-log-terms", no_log_terms,
                   "Drop the log terms from the capacity constants");
  table1->add_option("--out", out_path, "CSV output path (default stdout)");

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Empirical perturbation and noise-stability checks");
  validate->add_option("--config", config_path, "Network config file")
      ->required();
  auto* validate_trials =
      validate->add_option("--trials", trials, "Trials override");
  auto* validate_seed = validate->add_option("--seed", seed, "Seed override");
  auto* validate_threads =
      validate->add_option("--threads", threads, "Worker threads override");
  validate->add_option("--out", out_path, "CSV output path (default stdout)");

  // bound
  auto* bound = app.add_subcommand(
      "bound", "Evaluate the generalization bound for a config");
  double margin_loss = 0.0;
  bool lemma_log = false;
  bound->add_option("--config", config_path, "Architecture config file")
      ->required();
  bound->add_option("--margin-loss", margin_loss,
                    "Empirical margin loss in [0, 1]");
  bound->add_flag("--lemma-log", lemma_log,
                  "Use the ln(6m/delta) form of the additive log term");
  bound->add_option("--out", out_path, "CSV output path (default stdout)");

  // mc
  auto* mc = app.add_subcommand(
      "mc", "Monte Carlo spectral-norm summary for one layer");
  std::string kind = "dense_sparse";
  std::int64_t d_in = 100;
  std::int64_t d_out = 100;
  std::int64_t cap = 10;
  std::int64_t in_channels = 1;
  std::int64_t out_channels = 1;
  mc->add_option("--kind", kind, "dense_sparse, convlike, or conv");
  mc->add_option("--d-in", d_in, "Dense input dimension");
  mc->add_option("--d-out", d_out, "Dense output dimension");
  mc->add_option("--s", cap, "Dense row/column sparsity cap");
  mc->add_option("--in-channels", in_channels, "Conv input channels");
  mc->add_option("--out-channels", out_channels, "Conv output channels");
  mc->add_option("--filter-size", filter_size, "Filter side length q");
  mc->add_option("--map-size", map_size, "Feature-map side length N");
  mc->add_option("--dim", dims, "Spatial dimensionality (1 or 2)");
  mc->add_option("--sigma", sigma, "Noise deviation");
  mc->add_option("--trials", trials, "Monte Carlo trials");
  mc->add_option("--seed", seed, "Master seed");
  mc->add_option("--threads", threads, "Worker threads");
  mc->add_option("--out", out_path, "CSV output path (default stdout)");

  // zoo
  auto* zoo = app.add_subcommand("zoo", "List the built-in architectures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (zoo->parsed()) {
    for (std::int32_t i = 0; i < cvb_zoo_count(); ++i) {
      std::cout << cvb_zoo_name(i) << "\n";
    }
    return kExitOk;
  }

  if (figure3->parsed()) {
    cvb_report* report = nullptr;
    const cvb_status s = cvb_cmd_figure3(
        channels.data(), channels.size(), filter_size, map_size, dims, sigma,
        trials, seed, threads, &report);
    if (s != CVB_OK) return fail_with(s);
    return emit_report(ReportPtr(report).get(), out_path, svg_path);
  }

  if (figure4->parsed()) {
    if (zoo_name.empty() == config_path.empty()) {
      std::cerr << "error: pass exactly one of --zoo or --config\n";
      return kExitInputError;
    }
    ConfigPtr config;
    if (!config_path.empty()) {
      int code = 0;
      config = load_config(config_path, &code);
      if (!config) return code;
    }
    cvb_report* report = nullptr;
    const cvb_status s =
        cvb_cmd_figure4(zoo_name.empty() ? nullptr : zoo_name.c_str(),
                        config.get(), sparsity, &report);
    if (s != CVB_OK) return fail_with(s);
    return emit_report(ReportPtr(report).get(), out_path, svg_path);
  }

  if (table1->parsed()) {
    cvb_report* report = nullptr;
    const cvb_status s =
        cvb_cmd_table1(gamma, samples, delta, no_log_terms ? 0 : 1, &report);
    if (s != CVB_OK) return fail_with(s);
    return emit_report(ReportPtr(report).get(), out_path, svg_path);
  }

  if (validate->parsed()) {
    int code = 0;
    ConfigPtr config = load_config(config_path, &code);
    if (!config) return code;
    cvb_report* report = nullptr;
    std::int32_t passed = 0;
    const cvb_status s = cvb_cmd_validate(
        config.get(), validate_trials->count() > 0 ? trials : 0,
        validate_seed->count() > 0 ? 1 : 0, seed,
        validate_threads->count() > 0 ? threads : 0, &passed, &report);
    if (s != CVB_OK) return fail_with(s);
    ReportPtr holder(report);
    const int emit_code = emit_report(holder.get(), out_path, svg_path);
    if (emit_code != kExitOk) return emit_code;
    if (passed == 0) {
      std::cerr << "validate: invariant violation detected\n";
      return kExitInvariantViolation;
    }
    return kExitOk;
  }

  if (bound->parsed()) {
    int code = 0;
    ConfigPtr config = load_config(config_path, &code);
    if (!config) return code;
    cvb_report* report = nullptr;
    const cvb_status s = cvb_cmd_bound(config.get(), margin_loss,
                                       lemma_log ? 1 : 0, &report);
    if (s != CVB_OK) return fail_with(s);
    return emit_report(ReportPtr(report).get(), out_path, svg_path);
  }

  if (mc->parsed()) {
    cvb_layer_desc layer{};
    if (kind == "dense_sparse") {
      layer.kind = CVB_LAYER_DENSE_SPARSE;
      layer.d_in = d_in;
      layer.d_out = d_out;
      layer.s = cap;
    } else if (kind == "convlike" || kind == "conv") {
      layer.kind = kind == "conv" ? CVB_LAYER_CONV : CVB_LAYER_CONVLIKE;
      layer.in_channels = in_channels;
      layer.out_channels = out_channels;
      layer.filter_size = filter_size;
      layer.map_size = map_size;
      layer.spatial_dims = dims;
    } else {
      std::cerr << "error: unknown --kind '" << kind << "'\n";
      return kExitInputError;
    }
    cvb_report* report = nullptr;
    const cvb_status s =
        cvb_cmd_mc(&layer, sigma, trials, seed, threads, &report);
    if (s != CVB_OK) return fail_with(s);
    return emit_report(ReportPtr(report).get(), out_path, svg_path);
  }

  return kExitInputError;
}
