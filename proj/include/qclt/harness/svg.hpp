#pragma once

// Self-contained SVG plots on a fixed 800x600 canvas.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "qclt/harness/record.hpp"
#include "qclt/stats.hpp"

namespace qclt::harness {

namespace svg {

inline constexpr int kWidth = 800;
inline constexpr int kHeight = 600;
inline constexpr double kLeft = 70;
inline constexpr double kRight = 770;
inline constexpr double kTop = 50;
inline constexpr double kBottom = 540;

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kRight - kLeft); }
  double py(double y) const { return kBottom - (y - y0) / (y1 - y0) * (kBottom - kTop); }
};

inline Frame padded(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) {
    x0 -= 1.0;
    x1 += 1.0;
  }
  if (!(y1 > y0)) {
    y0 -= 1.0;
    y1 += 1.0;
  }
  return {x0, x1, y0, y1};
}

inline std::string open(const PlotSpec& p) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  s += "<text x=\"400\" y=\"30\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">" +
       escape(p.title) + "</text>\n";
  s += "<text x=\"420\" y=\"585\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
       escape(p.xLabel) + "</text>\n";
  s += "<text x=\"20\" y=\"300\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
       "transform=\"rotate(-90 20 300)\">" +
       escape(p.yLabel) + "</text>\n";
  return s;
}

inline std::string axes(const Frame& f) {
  std::string s;
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(kRight) + "\" y2=\"" + num(kBottom) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" + num(kBottom) +
       "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(kBottom + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + num(xv) + "</text>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(f.py(yv) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(yv) + "</text>\n";
  }
  return s;
}

inline std::string polyline(const Frame& f, const std::vector<double>& xs, const std::vector<double>& ys,
                            const char* color) {
  std::string pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!pts.empty()) pts += ' ';
    pts += num(f.px(xs[i])) + "," + num(f.py(ys[i]));
  }
  return "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
}

inline std::string histogram(const PlotSpec& p) {
  constexpr int kBins = 40;
  const double lo = -4.0;
  const double hi = 4.0;
  const double width = (hi - lo) / kBins;
  std::vector<double> density(kBins, 0.0);
  for (double x : p.x) {
    const int b = static_cast<int>(std::floor((std::clamp(x, lo, hi - 1e-12) - lo) / width));
    density[b] += 1.0;
  }
  const double n = std::max<double>(1.0, static_cast<double>(p.x.size()));
  for (auto& d : density) d /= n * width;
  const double peak = std::max(0.45, *std::max_element(density.begin(), density.end()));
  const Frame f = padded(lo, hi, 0.0, peak * 1.05);
  std::string s = open(p) + axes(f);
  for (int b = 0; b < kBins; ++b) {
    const double x = lo + b * width;
    s += "<rect x=\"" + num(f.px(x)) + "\" y=\"" + num(f.py(density[b])) + "\" width=\"" +
         num(f.px(x + width) - f.px(x)) + "\" height=\"" + num(f.py(0.0) - f.py(density[b])) +
         "\" fill=\"steelblue\" stroke=\"white\"/>\n";
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i <= 200; ++i) {
    const double x = lo + (hi - lo) * i / 200.0;
    xs.push_back(x);
    ys.push_back(std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi));
  }
  s += polyline(f, xs, ys, "crimson");
  return s + "</svg>\n";
}

inline std::string qq(const PlotSpec& p) {
  std::vector<double> sorted = p.x;
  std::sort(sorted.begin(), sorted.end());
  const boost::math::normal_distribution<double> normal;
  std::vector<double> theo;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    theo.push_back(boost::math::quantile(normal, (static_cast<double>(i) + 0.5) / n));
  }
  double lo = -3.0;
  double hi = 3.0;
  if (!sorted.empty()) {
    lo = std::min({lo, sorted.front(), theo.front()});
    hi = std::max({hi, sorted.back(), theo.back()});
  }
  const Frame f = padded(lo, hi, lo, hi);
  std::string s = open(p) + axes(f);
  s += polyline(f, {lo, hi}, {lo, hi}, "crimson");
  // At most 2000 markers, evenly spaced in rank.
  const std::size_t step = std::max<std::size_t>(1, sorted.size() / 2000);
  for (std::size_t i = 0; i < sorted.size(); i += step) {
    s += "<circle cx=\"" + num(f.px(theo[i])) + "\" cy=\"" + num(f.py(sorted[i])) +
         "\" r=\"2\" fill=\"steelblue\"/>\n";
  }
  return s + "</svg>\n";
}

inline std::string trend(const PlotSpec& p) {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;
  if (!p.x.empty()) {
    x0 = *std::min_element(p.x.begin(), p.x.end());
    x1 = *std::max_element(p.x.begin(), p.x.end());
    y0 = std::min(0.0, *std::min_element(p.y.begin(), p.y.end()));
    y1 = *std::max_element(p.y.begin(), p.y.end()) * 1.1;
  }
  const Frame f = padded(x0, x1, y0, y1);
  std::string s = open(p) + axes(f);
  s += polyline(f, p.x, p.y, "steelblue");
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    s += "<circle cx=\"" + num(f.px(p.x[i])) + "\" cy=\"" + num(f.py(p.y[i])) + "\" r=\"4\" fill=\"steelblue\"/>\n";
  }
  return s + "</svg>\n";
}

}  // namespace svg

inline std::string render_svg(const PlotSpec& p) {
  switch (p.kind) {
    case PlotKind::histogram:
      return svg::histogram(p);
    case PlotKind::qq:
      return svg::qq(p);
    default:
      return svg::trend(p);
  }
}

}  // namespace qclt::harness
