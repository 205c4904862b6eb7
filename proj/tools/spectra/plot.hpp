#pragma once

#include <string>
#include <vector>

namespace spectra::cli {

struct BarSeries {
  std::string title;
  std::string y_label;
  std::vector<std::pair<std::string, double>> bars;
};

/// Vertical bar charts stacked top to bottom in one SVG document.
std::string bars_to_svg(const std::vector<BarSeries>& charts);

/// Long-format CSV: series,label,value.
std::string bars_to_csv(const std::vector<BarSeries>& charts);

}  // namespace spectra::cli
