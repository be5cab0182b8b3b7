#pragma once

// Minimal line/scatter plots as standalone SVG documents.

#include <string>
#include <vector>

namespace herald {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct SvgStyle {
  int width = 640;
  int height = 400;
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool lines = true;
};

/// Throws InvalidArgument on an empty input, mismatched lengths or NaN.
/// Infinite points are left out of the plot.
std::string render_svg(const std::vector<Series>& series, const SvgStyle& style = {});

/// At most about `target` round tick positions covering [lo, hi], ascending.
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

}  // namespace herald
