#pragma once

// Self-contained SVG charts. Each file embeds its data in a comment block.

#include <string>
#include <vector>

#include "lpplab/stats.hpp"

namespace lpplab {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_y = false;
  int width = 720;
  int height = 440;
};

std::string render_svg(const LineChart& chart);

std::string render_histogram_svg(const Histogram& h, const std::string& title, const std::string& x_label);

}  // namespace lpplab
