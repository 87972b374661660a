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

#include "convbound/report.hpp"

#include <cstdio>
#include <stdexcept>

#include "convbound/errors.hpp"

namespace convbound {

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

ExperimentReport::ExperimentReport(std::vector<std::string> columns)
    : columns_(std::move(columns)) {
  if (columns_.empty()) {
    throw InvalidInputError("report needs at least one column");
  }
}

void ExperimentReport::add_metadata(const std::string& key,
                                    const std::string& value) {
  metadata_.emplace_back(key, value);
}

void ExperimentReport::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) {
    throw InvalidInputError("report row has " + std::to_string(cells.size()) +
                            " cells, schema has " +
                            std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(cells));
}

const std::string& ExperimentReport::cell(std::size_t row,
                                          std::size_t col) const {
  return rows_.at(row).at(col);
}

double ExperimentReport::numeric_cell(std::size_t row, std::size_t col) const {
  const std::string& text = cell(row, col);
  try {
    std::size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw InvalidInputError("report cell '" + text + "' is not numeric");
  }
}

std::size_t ExperimentReport::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  throw InvalidInputError("report has no column named '" + name + "'");
}

namespace {

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\n\r") != std::string::npos;
}

void append_field(std::string& out, const std::string& field) {
  if (!needs_quoting(field)) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

}  // namespace

std::string ExperimentReport::to_csv() const {
  std::string out;
  for (const auto& [key, value] : metadata_) {
    out += "# ";
    out += key;
    out += ": ";
    out += value;
    out += '\n';
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i != 0) out += ',';
    append_field(out, columns_[i]);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != 0) out += ',';
      append_field(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace convbound
