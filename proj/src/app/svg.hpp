#pragma once

#include <string>
#include <vector>

namespace freqlab::app {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;  // circles instead of a polyline
};

// Static plot with linear or log axes, polylines, circles and text only.
struct SvgPlot {
  std::string title, xlabel, ylabel;
  bool logx = false, logy = false;
  bool equal_aspect = false;
  std::vector<Series> series;

  void write(const std::string& path) const;
};

}  // namespace freqlab::app
