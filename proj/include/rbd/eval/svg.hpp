#pragma once

#include <string>
#include <vector>

namespace rbd::eval {

/// Minimal standalone SVG plotting (no display server needed).
class SvgCanvas {
 public:
  SvgCanvas(double x_min, double x_max, double y_min, double y_max, int width_px = 640,
            int height_px = 640, std::string title = "");

  void circle(double x, double y, double radius_px, const std::string& color,
              double opacity = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double width_px = 1.5, bool dashed = false);
  /// Vertical band between (x, lo) and (x, hi) polylines (confidence region).
  void band(const std::vector<double>& xs, const std::vector<double>& lo,
            const std::vector<double>& hi, const std::string& color, double opacity = 0.25);
  void text(double x, double y, const std::string& s, int size_px = 12);

  std::string str() const;  // complete SVG document with axes

 private:
  double px(double x) const;
  double py(double y) const;

  double x_min_, x_max_, y_min_, y_max_;
  int w_, h_;
  std::string title_;
  std::string body_;
};

}  // namespace rbd::eval
