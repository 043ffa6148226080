#pragma once

// Minimal SVG 1.1 writer for campaign reports. Coordinates are printed with
// fixed precision so regenerated reports diff cleanly.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "earforge/geometry.hpp"

namespace earforge::svg {

inline std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", std::abs(v) < 5e-4 ? 0.0 : v);
  return buf;
}

inline std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
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

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  return colors;
}

class Canvas {
 public:
  Canvas(double width, double height) : width_(width), height_(height) {}

  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0) {
    body_ += "  <line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
             "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"/>\n";
  }

  void polyline(std::span<const std::pair<double, double>> pts, std::string_view stroke, bool closed = false,
                double width = 1.5) {
    body_ += closed ? "  <polygon points=\"" : "  <polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      body_ += (i ? " " : "") + num(pts[i].first) + "," + num(pts[i].second);
    }
    body_ += "\" fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"/>\n";
  }

  void rect(double x, double y, double w, double h, std::string_view fill) {
    if (h < 0.0) {
      y += h;
      h = -h;
    }
    body_ += "  <rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
             "\" fill=\"" + std::string(fill) + "\"/>\n";
  }

  void circle(double cx, double cy, double r, std::string_view stroke) {
    body_ += "  <circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-dasharray=\"4,3\"/>\n";
  }

  void text(double x, double y, std::string_view s, double size = 12.0, std::string_view anchor = "start") {
    body_ += "  <text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" + num(size) +
             "\" text-anchor=\"" + std::string(anchor) + "\">" + escape(s) + "</text>\n";
  }

  std::string str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           num(width_) + "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) +
           "\">\n  <rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
           "\" fill=\"white\"/>\n" + body_ + "</svg>\n";
  }

 private:
  double width_;
  double height_;
  std::string body_;
};

struct Series {
  std::string label;
  std::vector<double> values;
};

/// Grouped bar chart: one group per category, one bar per series.
inline std::string bar_chart(std::string_view title, const std::vector<std::string>& categories,
                             const std::vector<Series>& series, std::string_view y_label) {
  const double w = 720.0;
  const double h = 420.0;
  const double left = 70.0;
  const double right = 150.0;
  const double top = 50.0;
  const double bottom = 60.0;
  Canvas c(w, h);
  c.text(w / 2, 28, title, 16, "middle");

  double lo = 0.0;
  double hi = 0.0;
  for (const auto& s : series)
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= lo < 0.0 ? pad : 0.0;
  hi += pad;
  const double plot_h = h - top - bottom;
  const double plot_w = w - left - right;
  auto y_of = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };

  c.line(left, top, left, top + plot_h, "black");
  c.line(left, y_of(0.0), left + plot_w, y_of(0.0), "black");
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    c.line(left - 4, y_of(v), left, y_of(v), "black");
    c.text(left - 6, y_of(v) + 4, num(v), 10, "end");
  }
  c.text(18, top + plot_h / 2, y_label, 12, "middle");

  const double group_w = plot_w / static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  const double bar_w = 0.8 * group_w / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t g = 0; g < categories.size(); ++g) {
    const double gx = left + g * group_w + 0.1 * group_w;
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (g >= series[s].values.size()) continue;
      const double v = series[s].values[g];
      c.rect(gx + s * bar_w, y_of(0.0), bar_w * 0.9, y_of(v) - y_of(0.0), palette()[s % palette().size()]);
    }
    c.text(left + (g + 0.5) * group_w, top + plot_h + 18, categories[g], 11, "middle");
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double ly = top + 16.0 * static_cast<double>(s);
    c.rect(w - right + 12, ly, 10, 10, palette()[s % palette().size()]);
    c.text(w - right + 28, ly + 9, series[s].label, 11);
  }
  return c.str();
}

/// Deviation curves against angle (degrees on x).
inline std::string line_chart(std::string_view title, const std::vector<double>& theta,
                              const std::vector<Series>& series, std::string_view y_label) {
  const double w = 720.0;
  const double h = 400.0;
  const double left = 70.0;
  const double right = 150.0;
  const double top = 50.0;
  const double bottom = 50.0;
  Canvas c(w, h);
  c.text(w / 2, 28, title, 16, "middle");
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& s : series)
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double plot_h = h - top - bottom;
  const double plot_w = w - left - right;
  auto x_of = [&](double t) { return left + t / kTwoPi * plot_w; };
  auto y_of = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };
  c.line(left, top + plot_h, left + plot_w, top + plot_h, "black");
  c.line(left, top, left, top + plot_h, "black");
  c.line(left, y_of(0.0), left + plot_w, y_of(0.0), "#999999");
  for (int deg = 0; deg <= 360; deg += 45) {
    const double x = x_of(deg * kPi / 180.0);
    c.line(x, top + plot_h, x, top + plot_h + 4, "black");
    c.text(x, top + plot_h + 18, std::to_string(deg), 10, "middle");
  }
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    c.text(left - 6, y_of(v) + 4, num(v), 10, "end");
  }
  c.text(18, top + plot_h / 2, y_label, 12, "middle");
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < theta.size() && k < series[s].values.size(); ++k) {
      pts.emplace_back(x_of(theta[k]), y_of(series[s].values[k]));
    }
    c.polyline(pts, palette()[s % palette().size()]);
    const double ly = top + 16.0 * static_cast<double>(s);
    c.rect(w - right + 12, ly, 10, 10, palette()[s % palette().size()]);
    c.text(w - right + 28, ly + 9, series[s].label, 11);
  }
  return c.str();
}

/// Polar deviation plot: radius = base + gain * deviation, dashed base circle = target.
inline std::string polar_chart(std::string_view title, const std::vector<double>& theta,
                               const std::vector<Series>& series) {
  const double w = 560.0;
  const double h = 560.0;
  const double cx = w / 2;
  const double cy = h / 2 + 10;
  const double base = 170.0;
  Canvas c(w, h);
  c.text(w / 2, 28, title, 16, "middle");
  double peak = 0.0;
  for (const auto& s : series)
    for (double v : s.values) peak = std::max(peak, std::abs(v));
  const double gain = peak > 0.0 ? 60.0 / peak : 0.0;
  c.circle(cx, cy, base, "#999999");
  c.text(cx, cy - base - 8, "target", 10, "middle");
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < theta.size() && k < series[s].values.size(); ++k) {
      const double r = base + gain * series[s].values[k];
      pts.emplace_back(cx + r * std::cos(theta[k]), cy - r * std::sin(theta[k]));
    }
    c.polyline(pts, palette()[s % palette().size()], true);
    c.rect(16, 46 + 16.0 * static_cast<double>(s), 10, 10, palette()[s % palette().size()]);
    c.text(32, 55 + 16.0 * static_cast<double>(s), series[s].label, 11);
  }
  c.text(w - 16, h - 12, "radial gain " + num(gain) + " px/mm", 10, "end");
  return c.str();
}

}  // namespace earforge::svg
