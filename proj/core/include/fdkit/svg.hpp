#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fdkit::svg {

// Data-space to pixel mapping for one plot panel.
struct Axes {
  double x0 = 0.0, x1 = 1.0;  // data range
  double y0 = 0.0, y1 = 1.0;
  double left = 70.0, top = 30.0, width = 560.0, height = 380.0;  // px

  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

// "Nice" tick positions covering [lo, hi] with roughly `target` ticks.
std::vector<double> ticks(double lo, double hi, int target = 6);

// Rounds the upper end out to the next tick so axes end on a label.
double nice_ceil(double hi, int target = 6);

class Document {
 public:
  Document(double width, double height);

  void line(double x1, double y1, double x2, double y2, std::string_view style);
  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view style);
  void polygon(const std::vector<std::pair<double, double>>& pts, std::string_view style);
  void circle(double cx, double cy, double r, std::string_view style);
  void text(double x, double y, std::string_view content, std::string_view style);
  void axes(const Axes& a, std::string_view x_label, std::string_view y_label);

  std::string str() const;

 private:
  double width_;
  double height_;
  std::string body_;
};

std::string escape(std::string_view text);

}  // namespace fdkit::svg
