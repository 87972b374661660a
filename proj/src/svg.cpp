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

#include "convbound/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "convbound/errors.hpp"

namespace convbound {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 160.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

struct Scale {
  double x_min, x_max, y_min, y_max;
  double px(double x) const {
    const double span = x_max > x_min ? x_max - x_min : 1.0;
    return kMarginLeft +
           (x - x_min) / span * (kWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    const double span = y_max > y_min ? y_max - y_min : 1.0;
    return kHeight - kMarginBottom -
           (y - y_min) / span * (kHeight - kMarginTop - kMarginBottom);
  }
};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void polyline(std::string& out, const Scale& scale,
              const std::vector<double>& x, const std::vector<double>& y,
              const std::string& color, bool dashed) {
  out += "<polyline fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"1.8\"";
  if (dashed) out += " stroke-dasharray=\"6,4\"";
  out += " points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i != 0) out += ' ';
    out += format_double(scale.px(x[i])) + "," + format_double(scale.py(y[i]));
  }
  out += "\"/>\n";
}

}  // namespace

std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series,
                              const std::vector<SvgBand>& bands) {
  if (series.empty()) {
    throw InvalidInputError("render_line_chart: no series");
  }
  Scale scale{};
  bool first = true;
  auto extend = [&](double x, double y) {
    if (first) {
      scale.x_min = scale.x_max = x;
      scale.y_min = scale.y_max = y;
      first = false;
      return;
    }
    scale.x_min = std::min(scale.x_min, x);
    scale.x_max = std::max(scale.x_max, x);
    scale.y_min = std::min(scale.y_min, y);
    scale.y_max = std::max(scale.y_max, y);
  };
  for (const SvgSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) extend(s.x[i], s.y[i]);
  }
  for (const SvgBand& b : bands) {
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      extend(b.x[i], b.lower[i]);
      extend(b.x[i], b.upper[i]);
    }
  }
  // Leave visual headroom.
  const double pad = 0.06 * (scale.y_max - scale.y_min + 1e-12);
  scale.y_min -= pad;
  scale.y_max += pad;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         format_double(kWidth) + "\" height=\"" + format_double(kHeight) +
         "\" viewBox=\"0 0 " + format_double(kWidth) + " " +
         format_double(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + format_double(kWidth / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
         "font-family=\"sans-serif\">" +
         escape(title) + "</text>\n";

  for (const SvgBand& band : bands) {
    out += "<polygon fill=\"" + band.color +
           "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < band.x.size(); ++i) {
      if (i != 0) out += ' ';
      out += format_double(scale.px(band.x[i])) + "," +
             format_double(scale.py(band.upper[i]));
    }
    for (std::size_t i = band.x.size(); i > 0; --i) {
      out += ' ';
      out += format_double(scale.px(band.x[i - 1])) + "," +
             format_double(scale.py(band.lower[i - 1]));
    }
    out += "\"/>\n";
  }

  // Axes with min/max tick labels.
  const double x0 = kMarginLeft;
  const double x1 = kWidth - kMarginRight;
  const double y0 = kHeight - kMarginBottom;
  const double y1 = kMarginTop;
  out += "<line x1=\"" + format_double(x0) + "\" y1=\"" + format_double(y0) +
         "\" x2=\"" + format_double(x1) + "\" y2=\"" + format_double(y0) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + format_double(x0) + "\" y1=\"" + format_double(y0) +
         "\" x2=\"" + format_double(x0) + "\" y2=\"" + format_double(y1) +
         "\" stroke=\"black\"/>\n";
  out += "<text x=\"" + format_double((x0 + x1) / 2) + "\" y=\"" +
         format_double(kHeight - 14.0) +
         "\" text-anchor=\"middle\" font-size=\"12\" "
         "font-family=\"sans-serif\">" +
         escape(x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + format_double((y0 + y1) / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 18 " +
         format_double((y0 + y1) / 2) + ")\">" +
         escape(y_label) + "</text>\n";
  out += "<text x=\"" + format_double(x0) + "\" y=\"" +
         format_double(y0 + 16.0) +
         "\" font-size=\"11\" font-family=\"sans-serif\">" +
         format_double(scale.x_min) + "</text>\n";
  out += "<text x=\"" + format_double(x1) + "\" y=\"" +
         format_double(y0 + 16.0) +
         "\" text-anchor=\"end\" font-size=\"11\" "
         "font-family=\"sans-serif\">" +
         format_double(scale.x_max) + "</text>\n";
  out += "<text x=\"" + format_double(x0 - 6.0) + "\" y=\"" +
         format_double(y0) +
         "\" text-anchor=\"end\" font-size=\"11\" "
         "font-family=\"sans-serif\">" +
         format_double(scale.y_min) + "</text>\n";
  out += "<text x=\"" + format_double(x0 - 6.0) + "\" y=\"" +
         format_double(y1 + 4.0) +
         "\" text-anchor=\"end\" font-size=\"11\" "
         "font-family=\"sans-serif\">" +
         format_double(scale.y_max) + "</text>\n";

  for (const SvgSeries& s : series) {
    polyline(out, scale, s.x, s.y, s.color, s.dashed);
  }

  // Legend.
  double legend_y = kMarginTop + 10.0;
  for (const SvgSeries& s : series) {
    const double lx = kWidth - kMarginRight + 12.0;
    out += "<line x1=\"" + format_double(lx) + "\" y1=\"" +
           format_double(legend_y) + "\" x2=\"" + format_double(lx + 22.0) +
           "\" y2=\"" + format_double(legend_y) + "\" stroke=\"" + s.color +
           "\" stroke-width=\"1.8\"" +
           (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
    out += "<text x=\"" + format_double(lx + 28.0) + "\" y=\"" +
           format_double(legend_y + 4.0) +
           "\" font-size=\"11\" font-family=\"sans-serif\">" +
           escape(s.label) + "</text>\n";
    legend_y += 18.0;
  }
  out += "</svg>\n";
  return out;
}

namespace {

std::string render_figure3(const ExperimentReport& report) {
  const std::size_t kind_col = report.column_index("kind");
  const std::size_t channel_col = report.column_index("channels");
  const std::size_t mean_col = report.column_index("empirical_mean");
  const std::size_t min_col = report.column_index("empirical_min");
  const std::size_t max_col = report.column_index("empirical_max");
  const std::size_t theory_col = report.column_index("theory_threshold");

  struct KindData {
    std::vector<double> x, mean, lo, hi, theory;
  };
  std::map<std::string, KindData> per_kind;
  for (std::size_t r = 0; r < report.rows().size(); ++r) {
    KindData& data = per_kind[report.cell(r, kind_col)];
    data.x.push_back(report.numeric_cell(r, channel_col));
    data.mean.push_back(report.numeric_cell(r, mean_col));
    data.lo.push_back(report.numeric_cell(r, min_col));
    data.hi.push_back(report.numeric_cell(r, max_col));
    data.theory.push_back(report.numeric_cell(r, theory_col));
  }

  const std::map<std::string, std::string> colors{
      {"convlike", "#c0392b"}, {"conv", "#8e44ad"}};
  std::vector<SvgSeries> series;
  std::vector<SvgBand> bands;
  for (const auto& [kind, data] : per_kind) {
    const auto color_it = colors.find(kind);
    const std::string color =
        color_it != colors.end() ? color_it->second : "#2c3e50";
    series.push_back({kind + " empirical", color, false, data.x, data.mean});
    series.push_back({kind + " bound", color, true, data.x, data.theory});
    bands.push_back({color, data.x, data.lo, data.hi});
  }
  return render_line_chart("Perturbation spectral norms", "channels",
                           "spectral norm", series, bands);
}

std::string render_figure4(const ExperimentReport& report) {
  const std::size_t layer_col = report.column_index("layer");
  const struct {
    const char* column;
    const char* label;
    const char* color;
  } estimates[] = {
      {"log10_ambient", "ambient", "#d4a017"},
      {"log10_sparse", "sparse", "#c2185b"},
      {"log10_convlike", "convlike", "#c0392b"},
      {"log10_conv", "conv", "#8e44ad"},
  };
  std::vector<SvgSeries> series;
  for (const auto& est : estimates) {
    const std::size_t col = report.column_index(est.column);
    SvgSeries s{est.label, est.color, false, {}, {}};
    for (std::size_t r = 0; r < report.rows().size(); ++r) {
      if (report.cell(r, col).empty()) continue;
      s.x.push_back(report.numeric_cell(r, layer_col));
      s.y.push_back(report.numeric_cell(r, col));
    }
    if (!s.x.empty()) series.push_back(std::move(s));
  }
  return render_line_chart("Layer capacity constants", "layer",
                           "log10(c^2)", series, {});
}

}  // namespace

std::optional<std::string> render_report_svg(const ExperimentReport& report) {
  if (report.plot_kind() == "figure3") return render_figure3(report);
  if (report.plot_kind() == "figure4") return render_figure4(report);
  return std::nullopt;
}

}  // namespace convbound
