#include "spectra/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "spectra/records_io.hpp"

namespace spectra::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kChartHeight = 300.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

}  // namespace

std::string bars_to_svg(const std::vector<BarSeries>& charts) {
  const double total_h = kChartHeight * static_cast<double>(charts.size());
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(total_h)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t c = 0; c < charts.size(); ++c) {
    const auto& chart = charts[c];
    const double top = kChartHeight * static_cast<double>(c);
    const double plot_h = kChartHeight - kMarginTop - kMarginBottom;
    const double plot_w = kWidth - kMarginLeft - 20.0;
    double max_v = 0.0;
    for (const auto& [label, v] : chart.bars) max_v = std::max(max_v, v);
    if (max_v <= 0.0) max_v = 1.0;

    svg << "<g class=\"chart\" data-title=\"" << escape(chart.title) << "\">\n";
    svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"" << num(top + 20) << "\" text-anchor=\"middle\">"
        << escape(chart.title) << "</text>\n";
    svg << "<text x=\"14\" y=\"" << num(top + kMarginTop + plot_h / 2) << "\" transform=\"rotate(-90 14 "
        << num(top + kMarginTop + plot_h / 2) << ")\" text-anchor=\"middle\">" << escape(chart.y_label)
        << "</text>\n";
    const double axis_y = top + kMarginTop + plot_h;
    svg << "<line x1=\"" << num(kMarginLeft) << "\" y1=\"" << num(axis_y) << "\" x2=\"" << num(kMarginLeft + plot_w)
        << "\" y2=\"" << num(axis_y) << "\" stroke=\"black\"/>\n";
    const double slot = chart.bars.empty() ? plot_w : plot_w / static_cast<double>(chart.bars.size());
    for (std::size_t i = 0; i < chart.bars.size(); ++i) {
      const auto& [label, v] = chart.bars[i];
      const double h = plot_h * v / max_v;
      const double x = kMarginLeft + slot * static_cast<double>(i) + slot * 0.15;
      svg << "<rect class=\"bar\" data-label=\"" << escape(label) << "\" data-value=\"" << format_decimal(v)
          << "\" x=\"" << num(x) << "\" y=\"" << num(axis_y - h) << "\" width=\"" << num(slot * 0.7)
          << "\" height=\"" << num(h) << "\" fill=\"#4a78b5\"/>\n";
      svg << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << num(axis_y + 16)
          << "\" text-anchor=\"middle\">" << escape(label) << "</text>\n";
      svg << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << num(axis_y - h - 4)
          << "\" text-anchor=\"middle\">" << format_decimal(v) << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string bars_to_csv(const std::vector<BarSeries>& charts) {
  std::ostringstream csv;
  csv << "series,label,value\n";
  for (const auto& chart : charts)
    for (const auto& [label, v] : chart.bars) csv << chart.title << ',' << label << ',' << format_decimal(v) << '\n';
  return csv.str();
}

}  // namespace spectra::cli
