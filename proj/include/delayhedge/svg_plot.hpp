#pragma once

// Minimal static SVG line plots for sweep results; no plotting dependency.

#include <string>
#include <utility>
#include <vector>

namespace delayhedge {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), x ascending
};

/// Writes one SVG line chart with a legend, one polyline per series.
void write_svg_line_plot(const std::string& path, const std::string& title,
                         const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series);

}  // namespace delayhedge
