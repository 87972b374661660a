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

// Exercises the shared library strictly through the C header.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "convbound.h"

namespace {

const char* kConfigText = R"json({
  "schema_version": 1,
  "name": "capi-desk",
  "layers": [
    {"kind": "conv", "in_channels": 1, "out_channels": 2,
     "filter_size": 3, "map_size": 8, "spatial_dims": 1},
    {"kind": "dense_sparse", "d_in": 16, "d_out": 8, "s": 4}
  ],
  "bound": {"gamma": 1.0, "B": 1.0, "m": 1000, "delta": 0.05},
  "options": {"seed": 7, "trials": 20, "threads": 2}
})json";

std::string take_string(char* text) {
  REQUIRE(text != nullptr);
  std::string out(text);
  cvb_string_free(text);
  return out;
}

}  // namespace

TEST_CASE("version and zoo listing") {
  CHECK(std::strlen(cvb_version()) > 0);
  REQUIRE(cvb_zoo_count() == 3);
  CHECK(std::string(cvb_zoo_name(0)) == "lenet5");
  CHECK(cvb_zoo_name(17) == nullptr);
}

TEST_CASE("matrix handles and norms") {
  const double entries[] = {3.0, 0.0, 0.0, 1.0};
  cvb_matrix* m = nullptr;
  REQUIRE(cvb_matrix_create(2, 2, entries, &m) == CVB_OK);
  CHECK(cvb_matrix_rows(m) == 2);
  CHECK(cvb_matrix_cols(m) == 2);

  double value = 0.0;
  REQUIRE(cvb_matrix_get(m, 0, 0, &value) == CVB_OK);
  CHECK(value == 3.0);
  CHECK(cvb_matrix_get(m, 2, 0, &value) == CVB_ERROR_INVALID_INPUT);

  double norm = 0.0;
  REQUIRE(cvb_matrix_spectral_norm(m, 0.0, &norm) == CVB_OK);
  CHECK(norm == doctest::Approx(3.0).epsilon(1e-10));
  REQUIRE(cvb_matrix_frobenius_norm(m, &norm) == CVB_OK);
  CHECK(norm == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
  cvb_matrix_free(m);
}

TEST_CASE("matrix error paths set messages") {
  cvb_matrix* m = nullptr;
  CHECK(cvb_matrix_create(0, 2, nullptr, &m) == CVB_ERROR_INVALID_INPUT);
  CHECK(std::strlen(cvb_last_error()) > 0);

  const double bad[] = {1.0, std::nan("")};
  CHECK(cvb_matrix_create(1, 2, bad, &m) == CVB_ERROR_INVALID_INPUT);
  CHECK(std::string(cvb_last_error()).find("finite") != std::string::npos);
}

TEST_CASE("sparsification through the C surface") {
  const double entries[] = {5.0, 1.0, 2.0, 4.0};
  cvb_matrix* m = nullptr;
  REQUIRE(cvb_matrix_create(2, 2, entries, &m) == CVB_OK);
  cvb_matrix* sparse = nullptr;
  REQUIRE(cvb_matrix_sparsify(m, 1, &sparse) == CVB_OK);
  double value = 0.0;
  cvb_matrix_get(sparse, 0, 0, &value);
  CHECK(value == 5.0);
  cvb_matrix_get(sparse, 0, 1, &value);
  CHECK(value == 0.0);
  cvb_matrix_get(sparse, 1, 1, &value);
  CHECK(value == 4.0);
  cvb_matrix_free(sparse);
  cvb_matrix_free(m);
}

TEST_CASE("closed-form bounds") {
  double threshold = 0.0, tail = 0.0;
  REQUIRE(cvb_bound_sparse(4, 1.0, 0.0, &threshold, &tail) == CVB_OK);
  CHECK(threshold == doctest::Approx(4.0));
  CHECK(tail == doctest::Approx(1.0));

  REQUIRE(cvb_bound_convlike(2, 2, 3, 1.0, 0.0, &threshold, &tail) == CVB_OK);
  CHECK(threshold == doctest::Approx(6.0 * std::sqrt(2.0)).epsilon(1e-12));

  REQUIRE(cvb_bound_conv(1, 1, 1, 4, 2, 1.0, 1, 0.0, &threshold, &tail) ==
          CVB_OK);
  CHECK(threshold == doctest::Approx(2.8));
  CHECK(tail == doctest::Approx(1.0));  // clamped 2N^2 prefactor

  REQUIRE(cvb_bound_gaussian_dense(100, 100, 1.0, 0.0, &threshold, &tail) ==
          CVB_OK);
  CHECK(threshold == doctest::Approx(20.0));

  CHECK(cvb_bound_sparse(0, 1.0, 0.0, &threshold, &tail) ==
        CVB_ERROR_INVALID_INPUT);
  CHECK(cvb_bound_convlike(2, 2, 3, -1.0, 0.0, &threshold, &tail) ==
        CVB_ERROR_INVALID_INPUT);
}

TEST_CASE("config parsing, canonical form and getters") {
  cvb_config* config = nullptr;
  REQUIRE(cvb_config_parse(kConfigText, &config) == CVB_OK);
  CHECK(cvb_config_seed(config) == 7);
  CHECK(cvb_config_trials(config) == 20);
  CHECK(cvb_config_threads(config) == 2);

  char* canonical = nullptr;
  REQUIRE(cvb_config_canonical(config, &canonical) == CVB_OK);
  const std::string text = take_string(canonical);
  CHECK(text.find("\"schema_version\": 1") != std::string::npos);

  cvb_config* reparsed = nullptr;
  REQUIRE(cvb_config_parse(text.c_str(), &reparsed) == CVB_OK);
  char* again = nullptr;
  REQUIRE(cvb_config_canonical(reparsed, &again) == CVB_OK);
  CHECK(take_string(again) == text);
  cvb_config_free(reparsed);
  cvb_config_free(config);

  cvb_config* bad = nullptr;
  CHECK(cvb_config_parse("{\"schema_version\": 1}", &bad) == CVB_ERROR_PARSE);
  CHECK(std::string(cvb_last_error()).find("layers") != std::string::npos);
}

TEST_CASE("mc command and report access") {
  cvb_layer_desc layer{};
  layer.kind = CVB_LAYER_DENSE_SPARSE;
  layer.d_in = 20;
  layer.d_out = 20;
  layer.s = 5;
  cvb_report* report = nullptr;
  REQUIRE(cvb_cmd_mc(&layer, 1.0, 25, 11, 2, &report) == CVB_OK);
  REQUIRE(report != nullptr);
  CHECK(cvb_report_column_count(report) == 2);
  CHECK(std::string(cvb_report_column_name(report, 0)) == "metric");
  CHECK(cvb_report_row_count(report) > 5);
  CHECK(std::string(cvb_report_cell(report, 0, 0)) == "trials");
  CHECK(std::string(cvb_report_cell(report, 0, 1)) == "25");
  CHECK(cvb_report_cell(report, 9999, 0) == nullptr);

  char* csv = nullptr;
  REQUIRE(cvb_report_csv(report, &csv) == CVB_OK);
  CHECK(take_string(csv).find("metric,value") != std::string::npos);

  // Summary reports have no plot form.
  char* svg = nullptr;
  CHECK(cvb_report_svg(report, &svg) == CVB_ERROR_INVALID_INPUT);
  cvb_report_free(report);
}

TEST_CASE("figure3 command renders csv and svg identically across threads") {
  const int64_t channels[] = {1, 2};
  cvb_report* one = nullptr;
  cvb_report* eight = nullptr;
  REQUIRE(cvb_cmd_figure3(channels, 2, 3, 8, 1, 1.0, 10, 5, 1, &one) ==
          CVB_OK);
  REQUIRE(cvb_cmd_figure3(channels, 2, 3, 8, 1, 1.0, 10, 5, 8, &eight) ==
          CVB_OK);
  char* csv_one = nullptr;
  char* csv_eight = nullptr;
  REQUIRE(cvb_report_csv(one, &csv_one) == CVB_OK);
  REQUIRE(cvb_report_csv(eight, &csv_eight) == CVB_OK);
  CHECK(take_string(csv_one) == take_string(csv_eight));

  char* svg = nullptr;
  REQUIRE(cvb_report_svg(one, &svg) == CVB_OK);
  CHECK(take_string(svg).rfind("<svg", 0) == 0);
  cvb_report_free(one);
  cvb_report_free(eight);
}

TEST_CASE("figure4 and table1 commands") {
  cvb_report* report = nullptr;
  REQUIRE(cvb_cmd_figure4("lenet5", nullptr, 0.9, &report) == CVB_OK);
  CHECK(cvb_report_row_count(report) == 5);
  cvb_report_free(report);

  CHECK(cvb_cmd_figure4("nope", nullptr, 0.9, &report) ==
        CVB_ERROR_INVALID_INPUT);
  CHECK(std::string(cvb_last_error()).find("lenet5") != std::string::npos);
  CHECK(cvb_cmd_figure4(nullptr, nullptr, 0.9, &report) ==
        CVB_ERROR_INVALID_INPUT);

  cvb_config* config = nullptr;
  REQUIRE(cvb_config_parse(kConfigText, &config) == CVB_OK);
  REQUIRE(cvb_cmd_figure4(nullptr, config, 0.9, &report) == CVB_OK);
  CHECK(cvb_report_row_count(report) == 2);
  cvb_report_free(report);
  cvb_config_free(config);

  REQUIRE(cvb_cmd_table1(1.0, 50000, 0.05, 1, &report) == CVB_OK);
  CHECK(cvb_report_row_count(report) == 3);
  cvb_report_free(report);
  CHECK(cvb_cmd_table1(1.0, 1, 0.05, 1, &report) == CVB_ERROR_INVALID_INPUT);
}

TEST_CASE("validate command with overrides") {
  cvb_config* config = nullptr;
  REQUIRE(cvb_config_parse(kConfigText, &config) == CVB_OK);

  cvb_report* report = nullptr;
  int32_t passed = 0;
  REQUIRE(cvb_cmd_validate(config, 10, 1, 99, 2, &passed, &report) == CVB_OK);
  CHECK(passed == 1);

  char* csv = nullptr;
  REQUIRE(cvb_report_csv(report, &csv) == CVB_OK);
  const std::string text = take_string(csv);
  CHECK(text.find("# seed: 99") != std::string::npos);
  CHECK(text.find("# trials: 10") != std::string::npos);
  CHECK(text.find("violations,0") != std::string::npos);
  cvb_report_free(report);

  // bound evaluation over the same config
  REQUIRE(cvb_cmd_bound(config, 0.0, 0, &report) == CVB_OK);
  REQUIRE(cvb_report_csv(report, &csv) == CVB_OK);
  CHECK(take_string(csv).find("bound_value") != std::string::npos);
  cvb_report_free(report);
  cvb_config_free(config);
}
