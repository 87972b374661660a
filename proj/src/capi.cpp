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

#include "convbound.h"

#include <cstring>
#include <string>

#include "convbound/commands.hpp"
#include "convbound/concentration.hpp"
#include "convbound/config.hpp"
#include "convbound/errors.hpp"
#include "convbound/layer.hpp"
#include "convbound/matrix.hpp"
#include "convbound/report.hpp"
#include "convbound/svg.hpp"
#include "convbound/version.hpp"
#include "convbound/zoo.hpp"

struct cvb_matrix {
  convbound::Matrix value;
};

struct cvb_config {
  convbound::ParsedConfig value;
};

struct cvb_report {
  convbound::ExperimentReport value;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

template <typename Fn>
cvb_status guarded(Fn&& fn) {
  try {
    fn();
    return CVB_OK;
  } catch (const convbound::InvalidInputError& e) {
    set_error(e.what());
    return CVB_ERROR_INVALID_INPUT;
  } catch (const convbound::ParseError& e) {
    set_error(e.what());
    return CVB_ERROR_PARSE;
  } catch (const convbound::ResourceError& e) {
    set_error(e.what());
    return CVB_ERROR_RESOURCE;
  } catch (const std::exception& e) {
    set_error(e.what());
    return CVB_ERROR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return CVB_ERROR_INTERNAL;
  }
}

cvb_status require(bool condition, const char* message) {
  if (condition) return CVB_OK;
  set_error(message);
  return CVB_ERROR_INVALID_INPUT;
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

convbound::LayerSpec spec_from_desc(const cvb_layer_desc& desc) {
  auto positive = [](int64_t v, const char* name) -> std::size_t {
    if (v <= 0) {
      throw convbound::InvalidInputError(std::string(name) +
                                         " must be positive");
    }
    return static_cast<std::size_t>(v);
  };
  switch (desc.kind) {
    case CVB_LAYER_DENSE_SPARSE:
      return convbound::LayerSpec::dense_sparse(positive(desc.d_in, "d_in"),
                                                positive(desc.d_out, "d_out"),
                                                positive(desc.s, "s"));
    case CVB_LAYER_CONVLIKE:
      return convbound::LayerSpec::conv_like(
          positive(desc.in_channels, "in_channels"),
          positive(desc.out_channels, "out_channels"),
          positive(desc.filter_size, "filter_size"),
          positive(desc.map_size, "map_size"), desc.spatial_dims);
    case CVB_LAYER_CONV:
      return convbound::LayerSpec::conv(
          positive(desc.in_channels, "in_channels"),
          positive(desc.out_channels, "out_channels"),
          positive(desc.filter_size, "filter_size"),
          positive(desc.map_size, "map_size"), desc.spatial_dims);
  }
  throw convbound::InvalidInputError("unknown layer kind");
}

cvb_status eval_bound(const convbound::TailBound& bound, double t,
                      double* threshold, double* tail) {
  if (threshold != nullptr) *threshold = bound.threshold(t);
  if (tail != nullptr) *tail = bound.tail_prob(t);
  return CVB_OK;
}

}  // namespace

extern "C" {

const char* cvb_version(void) { return convbound::kVersion; }

const char* cvb_last_error(void) { return g_last_error.c_str(); }

void cvb_string_free(char* text) { delete[] text; }

/* ---- matrices ----------------------------------------------------------- */

cvb_status cvb_matrix_create(int64_t rows, int64_t cols,
                             const double* row_major, cvb_matrix** out) {
  if (cvb_status s = require(out != nullptr && row_major != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  if (cvb_status s = require(rows > 0 && cols > 0,
                             "matrix dimensions must be positive");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    std::vector<double> entries(
        row_major, row_major + static_cast<std::size_t>(rows * cols));
    *out = new cvb_matrix{convbound::Matrix(static_cast<std::size_t>(rows),
                                            static_cast<std::size_t>(cols),
                                            std::move(entries))};
  });
}

void cvb_matrix_free(cvb_matrix* matrix) { delete matrix; }

int64_t cvb_matrix_rows(const cvb_matrix* matrix) {
  return matrix == nullptr ? 0 : static_cast<int64_t>(matrix->value.rows());
}

int64_t cvb_matrix_cols(const cvb_matrix* matrix) {
  return matrix == nullptr ? 0 : static_cast<int64_t>(matrix->value.cols());
}

cvb_status cvb_matrix_get(const cvb_matrix* matrix, int64_t row, int64_t col,
                          double* out) {
  if (cvb_status s = require(matrix != nullptr && out != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  if (cvb_status s =
          require(row >= 0 && col >= 0 &&
                      static_cast<std::size_t>(row) < matrix->value.rows() &&
                      static_cast<std::size_t>(col) < matrix->value.cols(),
                  "matrix index out of range");
      s != CVB_OK) {
    return s;
  }
  *out = matrix->value(static_cast<std::size_t>(row),
                       static_cast<std::size_t>(col));
  return CVB_OK;
}

cvb_status cvb_matrix_spectral_norm(const cvb_matrix* matrix, double tol,
                                    double* out) {
  if (cvb_status s = require(matrix != nullptr && out != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    *out = convbound::spectral_norm(
        matrix->value, tol > 0.0 ? tol : convbound::kDefaultSpectralTol);
  });
}

cvb_status cvb_matrix_frobenius_norm(const cvb_matrix* matrix, double* out) {
  if (cvb_status s = require(matrix != nullptr && out != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] { *out = convbound::frobenius_norm(matrix->value); });
}

cvb_status cvb_matrix_sparsify(const cvb_matrix* matrix, int64_t s,
                               cvb_matrix** out) {
  if (cvb_status st = require(matrix != nullptr && out != nullptr,
                              "null argument");
      st != CVB_OK) {
    return st;
  }
  if (cvb_status st = require(s > 0, "s must be positive"); st != CVB_OK) {
    return st;
  }
  return guarded([&] {
    *out = new cvb_matrix{
        convbound::sparsify(matrix->value, static_cast<std::size_t>(s))
            .matrix};
  });
}

/* ---- bounds ------------------------------------------------------------- */

cvb_status cvb_bound_sparse(int64_t s, double sigma, double t,
                            double* threshold, double* tail) {
  if (cvb_status st = require(s > 0, "s must be positive"); st != CVB_OK) {
    return st;
  }
  return guarded([&] {
    eval_bound(convbound::bound_sparse(static_cast<std::size_t>(s), sigma), t,
               threshold, tail);
  });
}

cvb_status cvb_bound_convlike(int64_t in_channels, int64_t out_channels,
                              int64_t filter_size, double sigma, double t,
                              double* threshold, double* tail) {
  if (cvb_status st =
          require(in_channels > 0 && out_channels > 0 && filter_size > 0,
                  "channel and filter parameters must be positive");
      st != CVB_OK) {
    return st;
  }
  return guarded([&] {
    eval_bound(convbound::bound_convlike(
                   static_cast<std::size_t>(in_channels),
                   static_cast<std::size_t>(out_channels),
                   static_cast<std::size_t>(filter_size), sigma),
               t, threshold, tail);
  });
}

cvb_status cvb_bound_conv(int64_t in_channels, int64_t out_channels,
                          int64_t filter_size, int64_t map_size,
                          int32_t spatial_dims, double sigma,
                          int32_t use_appendix_constant, double t,
                          double* threshold, double* tail) {
  if (cvb_status st = require(in_channels > 0 && out_channels > 0 &&
                                  filter_size > 0 && map_size > 0,
                              "conv parameters must be positive");
      st != CVB_OK) {
    return st;
  }
  return guarded([&] {
    eval_bound(convbound::bound_conv(static_cast<std::size_t>(in_channels),
                                     static_cast<std::size_t>(out_channels),
                                     static_cast<std::size_t>(filter_size),
                                     static_cast<std::size_t>(map_size), sigma,
                                     use_appendix_constant != 0, spatial_dims),
               t, threshold, tail);
  });
}

cvb_status cvb_bound_gaussian_dense(int64_t rows, int64_t cols, double sigma,
                                    double t, double* threshold,
                                    double* tail) {
  if (cvb_status st = require(rows > 0 && cols > 0,
                              "dimensions must be positive");
      st != CVB_OK) {
    return st;
  }
  return guarded([&] {
    eval_bound(
        convbound::bound_gaussian_dense(static_cast<std::size_t>(rows),
                                        static_cast<std::size_t>(cols), sigma),
        t, threshold, tail);
  });
}

/* ---- config ------------------------------------------------------------- */

cvb_status cvb_config_parse(const char* text, cvb_config** out) {
  if (cvb_status s = require(text != nullptr && out != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  return guarded(
      [&] { *out = new cvb_config{convbound::parse_config(text)}; });
}

cvb_status cvb_config_parse_file(const char* path, cvb_config** out) {
  if (cvb_status s = require(path != nullptr && out != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  return guarded(
      [&] { *out = new cvb_config{convbound::parse_config_file(path)}; });
}

cvb_status cvb_config_canonical(const cvb_config* config, char** out_text) {
  if (cvb_status s = require(config != nullptr && out_text != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    *out_text = copy_string(convbound::canonical_config(config->value));
  });
}

void cvb_config_free(cvb_config* config) { delete config; }

uint64_t cvb_config_seed(const cvb_config* config) {
  return config == nullptr ? 0 : config->value.options.seed;
}

int64_t cvb_config_trials(const cvb_config* config) {
  return config == nullptr
             ? 0
             : static_cast<int64_t>(config->value.options.trials);
}

int32_t cvb_config_threads(const cvb_config* config) {
  return config == nullptr ? 1 : config->value.options.threads;
}

/* ---- zoo ---------------------------------------------------------------- */

int32_t cvb_zoo_count(void) {
  return static_cast<int32_t>(convbound::builtin_zoo().size());
}

const char* cvb_zoo_name(int32_t index) {
  const auto& zoo = convbound::builtin_zoo();
  if (index < 0 || static_cast<std::size_t>(index) >= zoo.size()) {
    return nullptr;
  }
  return zoo[static_cast<std::size_t>(index)].name.c_str();
}

/* ---- commands ----------------------------------------------------------- */

cvb_status cvb_cmd_figure3(const int64_t* channels, size_t channel_count,
                           int64_t filter_size, int64_t map_size,
                           int32_t spatial_dims, double sigma, int64_t trials,
                           uint64_t seed, int32_t threads, cvb_report** out) {
  if (cvb_status s = require(out != nullptr, "null report out-param");
      s != CVB_OK) {
    return s;
  }
  if (cvb_status s = require(channels != nullptr && channel_count > 0,
                             "channel list must be non-empty");
      s != CVB_OK) {
    return s;
  }
  if (cvb_status s = require(filter_size > 0 && map_size > 0 && trials > 0,
                             "filter, map and trial counts must be positive");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    convbound::Figure3Options options;
    options.channels.clear();
    for (size_t i = 0; i < channel_count; ++i) {
      if (channels[i] <= 0) {
        throw convbound::InvalidInputError("channel counts must be positive");
      }
      options.channels.push_back(static_cast<std::size_t>(channels[i]));
    }
    options.filter_size = static_cast<std::size_t>(filter_size);
    options.map_size = static_cast<std::size_t>(map_size);
    options.spatial_dims = spatial_dims;
    options.sigma = sigma;
    options.trials = static_cast<std::size_t>(trials);
    options.seed = seed;
    options.threads = threads > 0 ? threads : 1;
    *out = new cvb_report{convbound::cmd_figure3(options)};
  });
}

cvb_status cvb_cmd_figure4(const char* zoo_name, const cvb_config* config,
                           double sparsity, cvb_report** out) {
  if (cvb_status s = require(out != nullptr, "null report out-param");
      s != CVB_OK) {
    return s;
  }
  if (cvb_status s = require((zoo_name != nullptr) != (config != nullptr),
                             "pass exactly one of zoo_name or config");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    if (zoo_name != nullptr) {
      *out = new cvb_report{convbound::cmd_figure4(zoo_name, sparsity)};
    } else {
      *out = new cvb_report{convbound::cmd_figure4(
          config->value.arch.layers, config->value.name, sparsity)};
    }
  });
}

cvb_status cvb_cmd_table1(double gamma, int64_t sample_count, double delta,
                          int32_t with_log_terms, cvb_report** out) {
  if (cvb_status s = require(out != nullptr, "null report out-param");
      s != CVB_OK) {
    return s;
  }
  if (cvb_status s = require(sample_count > 1, "m must be >= 2");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    *out = new cvb_report{convbound::cmd_table1(
        gamma, static_cast<std::size_t>(sample_count), delta,
        with_log_terms != 0)};
  });
}

cvb_status cvb_cmd_validate(const cvb_config* config, int64_t trials_override,
                            int32_t has_seed_override, uint64_t seed_override,
                            int32_t threads_override, int32_t* all_passed,
                            cvb_report** out) {
  if (cvb_status s = require(config != nullptr && out != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    convbound::ParsedConfig effective = config->value;
    if (trials_override > 0) {
      effective.options.trials = static_cast<std::size_t>(trials_override);
    }
    if (has_seed_override != 0) effective.options.seed = seed_override;
    if (threads_override > 0) effective.options.threads = threads_override;
    convbound::ValidateOutcome outcome = convbound::cmd_validate(effective);
    if (all_passed != nullptr) *all_passed = outcome.passed ? 1 : 0;
    *out = new cvb_report{std::move(outcome.report)};
  });
}

cvb_status cvb_cmd_bound(const cvb_config* config, double margin_loss,
                         int32_t use_lemma_log_term, cvb_report** out) {
  if (cvb_status s = require(config != nullptr && out != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    *out = new cvb_report{convbound::cmd_bound(config->value, margin_loss,
                                               use_lemma_log_term != 0)};
  });
}

cvb_status cvb_cmd_mc(const cvb_layer_desc* layer, double sigma,
                      int64_t trials, uint64_t seed, int32_t threads,
                      cvb_report** out) {
  if (cvb_status s = require(layer != nullptr && out != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  if (cvb_status s = require(trials > 0, "trials must be positive");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    const convbound::LayerSpec spec = spec_from_desc(*layer);
    *out = new cvb_report{convbound::cmd_mc(spec, sigma,
                                            static_cast<std::size_t>(trials),
                                            seed, threads > 0 ? threads : 1)};
  });
}

/* ---- reports ------------------------------------------------------------ */

int64_t cvb_report_row_count(const cvb_report* report) {
  return report == nullptr ? 0
                           : static_cast<int64_t>(report->value.rows().size());
}

int64_t cvb_report_column_count(const cvb_report* report) {
  return report == nullptr
             ? 0
             : static_cast<int64_t>(report->value.columns().size());
}

const char* cvb_report_column_name(const cvb_report* report, int64_t column) {
  if (report == nullptr || column < 0 ||
      static_cast<std::size_t>(column) >= report->value.columns().size()) {
    return nullptr;
  }
  return report->value.columns()[static_cast<std::size_t>(column)].c_str();
}

const char* cvb_report_cell(const cvb_report* report, int64_t row,
                            int64_t column) {
  if (report == nullptr || row < 0 || column < 0 ||
      static_cast<std::size_t>(row) >= report->value.rows().size() ||
      static_cast<std::size_t>(column) >= report->value.columns().size()) {
    return nullptr;
  }
  return report->value
      .cell(static_cast<std::size_t>(row), static_cast<std::size_t>(column))
      .c_str();
}

cvb_status cvb_report_csv(const cvb_report* report, char** out_text) {
  if (cvb_status s = require(report != nullptr && out_text != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] { *out_text = copy_string(report->value.to_csv()); });
}

cvb_status cvb_report_svg(const cvb_report* report, char** out_text) {
  if (cvb_status s = require(report != nullptr && out_text != nullptr,
                             "null argument");
      s != CVB_OK) {
    return s;
  }
  return guarded([&] {
    const std::optional<std::string> svg =
        convbound::render_report_svg(report->value);
    if (!svg) {
      throw convbound::InvalidInputError(
          "this report has no plot form; only figure3 and figure4 do");
    }
    *out_text = copy_string(*svg);
  });
}

void cvb_report_free(cvb_report* report) { delete report; }

}  // extern "C"
