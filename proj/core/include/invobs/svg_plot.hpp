#pragma once

#include <string>
#include <vector>

namespace invobs {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotPanel {
  std::string title;
  std::vector<PlotSeries> series;
  bool log_y = false;
};

// Stacked time-series panels as a standalone SVG document.
std::string render_svg(const std::string& title, const std::vector<PlotPanel>& panels);

}  // namespace invobs
