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

#ifndef CONVBOUND_REPORT_HPP
#define CONVBOUND_REPORT_HPP

#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace convbound {

/// Fixed-format numeric rendering shared by every emitter, so re-runs are
/// byte-identical.
std::string format_double(double value);

/// Tabular experiment record. Cells are stored already formatted; metadata
/// lines (seed, parameters, artifact version) are emitted as leading
/// '#'-prefixed comment lines of the CSV so a run can be reproduced from
/// its output alone.
class ExperimentReport {
 public:
  explicit ExperimentReport(std::vector<std::string> columns);

  void add_metadata(const std::string& key, const std::string& value);

  /// Appends a row; cell count must match the schema.
  void add_row(std::vector<std::string> cells);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const {
    return metadata_;
  }

  const std::string& cell(std::size_t row, std::size_t col) const;

  /// Cell parsed as double; throws InvalidInputError when not numeric.
  double numeric_cell(std::size_t row, std::size_t col) const;

  std::size_t column_index(const std::string& name) const;

  /// RFC-style quoting, '.' decimal separator, '\n' line endings.
  std::string to_csv() const;

  /// Tag consumed by the SVG renderer ("figure3", "figure4", empty = none).
  void set_plot_kind(std::string kind) { plot_kind_ = std::move(kind); }
  const std::string& plot_kind() const { return plot_kind_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
  std::string plot_kind_;
};

}  // namespace convbound

#endif  // CONVBOUND_REPORT_HPP
