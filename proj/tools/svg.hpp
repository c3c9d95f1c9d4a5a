#pragma once

#include <string>
#include <vector>

namespace dewet::svg {

struct Series {
  std::vector<double> x, y;
  std::string color;
  std::string label;
  double width = 1.2;
};

struct Panel {
  std::string title, xlabel, ylabel;
  bool log_y = false;
  std::vector<Series> series;
};

/// Panels laid out on a grid of `cols` columns.
std::string render(const std::vector<Panel>& panels, int cols = 2, double panel_w = 460, double panel_h = 320);

/// Colour `i` of `n` on a blue-to-red ramp.
std::string ramp(int i, int n);

}  // namespace dewet::svg
