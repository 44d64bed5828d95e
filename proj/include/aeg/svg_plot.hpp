#pragma once

#include <string>
#include <utility>
#include <vector>

// Minimal log-log SVG plots for the experiment harness. Plot emission never
// feeds back into CSV content.

namespace aeg {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // positive coordinates only
};

struct PlotPanel {
  std::string title;
  std::string x_label = "k";
  std::string y_label;
  std::vector<PlotSeries> series;
};

// One panel per row, stacked vertically.
std::string render_loglog_svg(const std::vector<PlotPanel>& panels, int width = 860,
                              int panel_height = 420);

}  // namespace aeg
