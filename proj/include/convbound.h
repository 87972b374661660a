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

/*
 * C API of the convbound shared library.
 *
 * Conventions:
 *   - Functions returning cvb_status never throw across the boundary; on
 *     any status other than CVB_OK the thread-local message from
 *     cvb_last_error() describes the failure.
 *   - Objects are opaque handles created by cvb_*_create/parse functions
 *     and released by the matching cvb_*_free. Strings returned through
 *     char** out-params are heap copies released by cvb_string_free.
 *   - const char* returns (version, error text, report cells) stay owned
 *     by the library; report cells remain valid while the report lives.
 */

#ifndef CONVBOUND_H
#define CONVBOUND_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CVB_API __declspec(dllexport)
#else
#define CVB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cvb_status {
  CVB_OK = 0,
  CVB_ERROR_INVALID_INPUT = 1,
  CVB_ERROR_RESOURCE = 2,
  CVB_ERROR_PARSE = 3,
  CVB_ERROR_INTERNAL = 4
} cvb_status;

typedef enum cvb_layer_kind {
  CVB_LAYER_DENSE_SPARSE = 0,
  CVB_LAYER_CONVLIKE = 1,
  CVB_LAYER_CONV = 2
} cvb_layer_kind;

/* Plain-value layer description; unused fields of the other kind may stay
 * zero. */
typedef struct cvb_layer_desc {
  cvb_layer_kind kind;
  /* dense_sparse */
  int64_t d_in;
  int64_t d_out;
  int64_t s;
  /* convlike / conv */
  int64_t in_channels;
  int64_t out_channels;
  int64_t filter_size;
  int64_t map_size;
  int32_t spatial_dims;
} cvb_layer_desc;

typedef struct cvb_matrix cvb_matrix;
typedef struct cvb_config cvb_config;
typedef struct cvb_report cvb_report;

CVB_API const char* cvb_version(void);

/* Thread-local message for the most recent failing call on this thread. */
CVB_API const char* cvb_last_error(void);

CVB_API void cvb_string_free(char* text);

/* ---- dense matrices ---------------------------------------------------- */

CVB_API cvb_status cvb_matrix_create(int64_t rows, int64_t cols,
                                     const double* row_major,
                                     cvb_matrix** out);
CVB_API void cvb_matrix_free(cvb_matrix* matrix);
CVB_API int64_t cvb_matrix_rows(const cvb_matrix* matrix);
CVB_API int64_t cvb_matrix_cols(const cvb_matrix* matrix);
CVB_API cvb_status cvb_matrix_get(const cvb_matrix* matrix, int64_t row,
                                  int64_t col, double* out);

/* Largest singular value within relative tolerance tol (pass 0 for the
 * default). */
CVB_API cvb_status cvb_matrix_spectral_norm(const cvb_matrix* matrix,
                                            double tol, double* out);
CVB_API cvb_status cvb_matrix_frobenius_norm(const cvb_matrix* matrix,
                                             double* out);

/* Greedy magnitude sparsification with row/column cap s. */
CVB_API cvb_status cvb_matrix_sparsify(const cvb_matrix* matrix, int64_t s,
                                       cvb_matrix** out);

/* ---- closed-form spectral-norm tail bounds ----------------------------- */
/* Each fills threshold(t) and the tail probability at t. */

CVB_API cvb_status cvb_bound_sparse(int64_t s, double sigma, double t,
                                    double* threshold, double* tail);
CVB_API cvb_status cvb_bound_convlike(int64_t in_channels,
                                      int64_t out_channels,
                                      int64_t filter_size, double sigma,
                                      double t, double* threshold,
                                      double* tail);
CVB_API cvb_status cvb_bound_conv(int64_t in_channels, int64_t out_channels,
                                  int64_t filter_size, int64_t map_size,
                                  int32_t spatial_dims, double sigma,
                                  int32_t use_appendix_constant, double t,
                                  double* threshold, double* tail);
CVB_API cvb_status cvb_bound_gaussian_dense(int64_t rows, int64_t cols,
                                            double sigma, double t,
                                            double* threshold, double* tail);

/* ---- config documents --------------------------------------------------- */

CVB_API cvb_status cvb_config_parse(const char* text, cvb_config** out);
CVB_API cvb_status cvb_config_parse_file(const char* path, cvb_config** out);
CVB_API cvb_status cvb_config_canonical(const cvb_config* config,
                                        char** out_text);
CVB_API void cvb_config_free(cvb_config* config);
CVB_API uint64_t cvb_config_seed(const cvb_config* config);
CVB_API int64_t cvb_config_trials(const cvb_config* config);
CVB_API int32_t cvb_config_threads(const cvb_config* config);

/* ---- built-in architectures --------------------------------------------- */

CVB_API int32_t cvb_zoo_count(void);
/* NULL when index is out of range. */
CVB_API const char* cvb_zoo_name(int32_t index);

/* ---- experiment commands ------------------------------------------------ */

CVB_API cvb_status cvb_cmd_figure3(const int64_t* channels,
                                   size_t channel_count, int64_t filter_size,
                                   int64_t map_size, int32_t spatial_dims,
                                   double sigma, int64_t trials, uint64_t seed,
                                   int32_t threads, cvb_report** out);

/* Exactly one of zoo_name/config must be given. */
CVB_API cvb_status cvb_cmd_figure4(const char* zoo_name,
                                   const cvb_config* config, double sparsity,
                                   cvb_report** out);

CVB_API cvb_status cvb_cmd_table1(double gamma, int64_t sample_count,
                                  double delta, int32_t with_log_terms,
                                  cvb_report** out);

/* all_passed is set to 1 when every checked invariant held. Overrides with
 * trials_override <= 0, has_seed_override == 0, or threads_override <= 0
 * keep the config's own values. */
CVB_API cvb_status cvb_cmd_validate(const cvb_config* config,
                                    int64_t trials_override,
                                    int32_t has_seed_override,
                                    uint64_t seed_override,
                                    int32_t threads_override,
                                    int32_t* all_passed, cvb_report** out);

CVB_API cvb_status cvb_cmd_bound(const cvb_config* config, double margin_loss,
                                 int32_t use_lemma_log_term,
                                 cvb_report** out);

CVB_API cvb_status cvb_cmd_mc(const cvb_layer_desc* layer, double sigma,
                              int64_t trials, uint64_t seed, int32_t threads,
                              cvb_report** out);

/* ---- reports ------------------------------------------------------------ */

CVB_API int64_t cvb_report_row_count(const cvb_report* report);
CVB_API int64_t cvb_report_column_count(const cvb_report* report);
CVB_API const char* cvb_report_column_name(const cvb_report* report,
                                           int64_t column);
CVB_API const char* cvb_report_cell(const cvb_report* report, int64_t row,
                                    int64_t column);
CVB_API cvb_status cvb_report_csv(const cvb_report* report, char** out_text);
/* CVB_ERROR_INVALID_INPUT when the report has no plot form. */
CVB_API cvb_status cvb_report_svg(const cvb_report* report, char** out_text);
CVB_API void cvb_report_free(cvb_report* report);

#ifdef __cplusplus
}
#endif

#endif /* CONVBOUND_H */
