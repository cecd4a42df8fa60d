#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace annulus {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

// Standalone SVG with the panels side by side. The plotted data is repeated
// in XML comments so the file doubles as a data record.
std::string render_svg(const std::vector<PlotPanel>& panels);
void write_svg(const std::vector<PlotPanel>& panels, const std::filesystem::path& path);

}  // namespace annulus
