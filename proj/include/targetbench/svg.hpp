#pragma once

#include <string>
#include <vector>

namespace targetbench {

// One plotted line, optionally with a shaded band between lo and hi.
struct PlotSeries {
  std::string label;
  std::string color;  // e.g. "#1f77b4"
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;  // empty = no band
  std::vector<double> hi;
};

// Deterministic standalone SVG line plot: fixed layout, numbers formatted the
// same way on every run.
void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series);

}  // namespace targetbench
