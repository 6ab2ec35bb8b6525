#pragma once

#include <limits>
#include <string>
#include <vector>

namespace imet {

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
  bool markers_only = false;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // non-positive values are dropped
  int width = 640;
  int height = 420;
  /// Horizontal reference line, skipped when NaN.
  double reference_y = std::numeric_limits<double>::quiet_NaN();
};

/// Standalone SVG document with axes, ticks and a legend.
std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt);

}  // namespace imet
