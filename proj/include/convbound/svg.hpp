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

#ifndef CONVBOUND_SVG_HPP
#define CONVBOUND_SVG_HPP

#include <optional>
#include <string>
#include <vector>

#include "convbound/report.hpp"

namespace convbound {

struct SvgSeries {
  std::string label;
  std::string color;
  bool dashed = false;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgBand {
  std::string color;  // fill, drawn translucent
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Minimal static line chart with optional shaded bands.
std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series,
                              const std::vector<SvgBand>& bands);

/// Plot derived from a report's plot kind ("figure3": per-kind mean and
/// threshold lines with min-max bands; "figure4": per-estimate log10
/// capacity lines across layers). Reports without a plot kind yield
/// std::nullopt; the CSV content never depends on plotting.
std::optional<std::string> render_report_svg(const ExperimentReport& report);

}  // namespace convbound

#endif  // CONVBOUND_SVG_HPP
