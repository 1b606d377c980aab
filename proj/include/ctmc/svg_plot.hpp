#pragma once

#include <string>
#include <vector>

namespace ctmc {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "t";
  std::string y_label;
  int width = 720;
  int height = 440;
};

/// Static SVG line plot with axes, ticks and a legend. Output is a pure
/// function of the input (fixed number formatting).
std::string line_plot(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace ctmc
