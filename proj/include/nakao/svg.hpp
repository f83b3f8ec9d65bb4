#pragma once

// Minimal SVG writer for p-q plane plots: axes, polylines and point markers.

#include <string>
#include <utility>
#include <vector>

namespace nakao {

class SvgPlot {
 public:
  SvgPlot(double x_lo, double x_hi, double y_lo, double y_hi, int width = 640, int height = 640);

  void points(const std::vector<std::pair<double, double>>& xy, const std::string& color, double radius = 1.5);
  /// NaN entries break the line into separate segments.
  void polyline(const std::vector<std::pair<double, double>>& xy, const std::string& color, double stroke = 1.5);
  void label(double x, double y, const std::string& text);
  void axis_labels(const std::string& x_name, const std::string& y_name);

  std::string str() const;

 private:
  double sx(double x) const;
  double sy(double y) const;

  double x_lo_, x_hi_, y_lo_, y_hi_;
  int width_, height_;
  std::vector<std::string> body_;
};

}  // namespace nakao
