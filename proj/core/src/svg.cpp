#include "fdkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fdkit/csv.hpp"

namespace fdkit::svg {
namespace {

// Pixel coordinates are written with two decimals; enough for a screen and
// stable across platforms.
std::string num(double v) {
  char buf[32];
  const double r = std::round(v * 100.0) / 100.0;
  std::snprintf(buf, sizeof buf, "%.2f", r == 0.0 ? 0.0 : r);
  return buf;
}

std::string points_attr(const std::vector<std::pair<double, double>>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ' ';
    s += num(pts[i].first) + "," + num(pts[i].second);
  }
  return s;
}

double step_for(double lo, double hi, int target) {
  const double raw = (hi - lo) / std::max(1, target);
  if (!(raw > 0.0)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1.0 : f < 3.0 ? 2.0 : f < 7.0 ? 5.0 : 10.0;
  return nice * mag;
}

}  // namespace

std::vector<double> ticks(double lo, double hi, int target) {
  const double step = step_for(lo, hi, target);
  std::vector<double> out;
  for (double k = std::ceil(lo / step - 1e-9); k * step <= hi + 1e-9 * step; k += 1.0) {
    out.push_back(k * step == 0.0 ? 0.0 : k * step);
  }
  return out;
}

double nice_ceil(double hi, int target) {
  const double step = step_for(0.0, hi, target);
  return std::ceil(hi / step - 1e-9) * step;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::line(double x1, double y1, double x2, double y2, std::string_view style) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" " + std::string(style) + "/>\n";
}

void Document::polyline(const std::vector<std::pair<double, double>>& pts, std::string_view style) {
  body_ += "<polyline points=\"" + points_attr(pts) + "\" fill=\"none\" " + std::string(style) + "/>\n";
}

void Document::polygon(const std::vector<std::pair<double, double>>& pts, std::string_view style) {
  body_ += "<polygon points=\"" + points_attr(pts) + "\" " + std::string(style) + "/>\n";
}

void Document::circle(double cx, double cy, double r, std::string_view style) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" " +
           std::string(style) + "/>\n";
}

void Document::text(double x, double y, std::string_view content, std::string_view style) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" " + std::string(style) + ">" +
           escape(content) + "</text>\n";
}

void Document::axes(const Axes& a, std::string_view x_label, std::string_view y_label) {
  const std::string axis = "stroke=\"#000\" stroke-width=\"1\"";
  const std::string grid = "stroke=\"#ddd\" stroke-width=\"0.5\"";
  const std::string small = "font-family=\"sans-serif\" font-size=\"11\"";
  for (double x : ticks(a.x0, a.x1)) {
    line(a.px(x), a.top, a.px(x), a.top + a.height, grid);
    text(a.px(x), a.top + a.height + 16, csv::format_g6(x), small + " text-anchor=\"middle\"");
  }
  for (double y : ticks(a.y0, a.y1)) {
    line(a.left, a.py(y), a.left + a.width, a.py(y), grid);
    text(a.left - 6, a.py(y) + 4, csv::format_g6(y), small + " text-anchor=\"end\"");
  }
  line(a.left, a.top + a.height, a.left + a.width, a.top + a.height, axis);
  line(a.left, a.top, a.left, a.top + a.height, axis);
  text(a.left + a.width / 2, a.top + a.height + 36, x_label,
       "font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\"");
  const double yx = a.left - 48, yy = a.top + a.height / 2;
  text(yx, yy, y_label,
       "font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 " +
           num(yx) + " " + num(yy) + ")\"");
}

std::string Document::str() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
         num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n"
         "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n" + body_ + "</svg>\n";
}

}  // namespace fdkit::svg
