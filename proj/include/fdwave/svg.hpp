#pragma once

// Self-contained SVG emission for the three table kinds the CLI produces:
// eigenmode panels (blue curves, red dashed damping overlay), log-log scan
// scatters with the fitted power law, and energy traces.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdwave/powerfit.hpp"
#include "fdwave/table.hpp"

namespace fdwave {

namespace detail_svg {

inline constexpr double width = 760, height = 480;
inline constexpr double ml = 72, mr = 24, mt = 34, mb = 56;

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double unit(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double x = log ? std::log10(v) : v;
    return (x - a) / (b - a);
  }
};

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline double map_x(const Axis& ax, double v) { return ml + ax.unit(v) * (width - ml - mr); }
inline double map_y(const Axis& ax, double v) { return height - mb - ax.unit(v) * (height - mt - mb); }

inline Axis make_axis(double lo, double hi, bool log) {
  if (log) {
    lo = std::max(lo, 1e-300);
    hi = std::max(hi, lo * 10);
    return {std::pow(10, std::floor(std::log10(lo))), std::pow(10, std::ceil(std::log10(hi))),
            true};
  }
  if (lo == hi) lo -= 0.5, hi += 0.5;
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, false};
}

inline std::vector<double> ticks(const Axis& ax) {
  std::vector<double> t;
  if (ax.log) {
    for (double d = std::log10(ax.lo); d <= std::log10(ax.hi) + 1e-9; d += 1.0)
      t.push_back(std::pow(10, d));
    return t;
  }
  const double span = ax.hi - ax.lo;
  double step = std::pow(10, std::floor(std::log10(span / 5)));
  if (span / step > 10) step *= 2;
  if (span / step > 10) step *= 2.5;
  if (span / step > 10) step *= 2;
  for (double v = std::ceil(ax.lo / step) * step; v <= ax.hi + 1e-12 * span; v += step)
    t.push_back(v);
  return t;
}

inline std::string tick_label(double v) {
  char buf[32];
  if (v != 0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-3))
    std::snprintf(buf, sizeof(buf), "%.0e", v);
  else
    std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

class Canvas {
 public:
  Canvas(const Axis& x, const Axis& y, const std::string& xlabel, const std::string& ylabel,
         const std::string& title)
      : x_(x), y_(y) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
         << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out_ << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out_ << "<rect x=\"" << px(ml) << "\" y=\"" << px(mt) << "\" width=\"" << px(width - ml - mr)
         << "\" height=\"" << px(height - mt - mb)
         << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    for (double t : ticks(x_)) {
      const double gx = map_x(x_, t);
      out_ << "<line x1=\"" << px(gx) << "\" y1=\"" << px(height - mb) << "\" x2=\"" << px(gx)
           << "\" y2=\"" << px(height - mb + 5) << "\" stroke=\"#333333\"/>\n";
      out_ << "<text x=\"" << px(gx) << "\" y=\"" << px(height - mb + 18)
           << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">"
           << tick_label(t) << "</text>\n";
    }
    for (double t : ticks(y_)) {
      const double gy = map_y(y_, t);
      out_ << "<line x1=\"" << px(ml - 5) << "\" y1=\"" << px(gy) << "\" x2=\"" << px(ml)
           << "\" y2=\"" << px(gy) << "\" stroke=\"#333333\"/>\n";
      out_ << "<text x=\"" << px(ml - 8) << "\" y=\"" << px(gy + 4)
           << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">"
           << tick_label(t) << "</text>\n";
    }
    out_ << "<text x=\"" << px((ml + width - mr) / 2) << "\" y=\"" << px(height - 12)
         << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\">" << xlabel
         << "</text>\n";
    out_ << "<text x=\"16\" y=\"" << px((mt + height - mb) / 2)
         << "\" font-size=\"13\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            "transform=\"rotate(-90 16 "
         << px((mt + height - mb) / 2) << ")\">" << ylabel << "</text>\n";
    out_ << "<text x=\"" << px((ml + width - mr) / 2) << "\" y=\"" << px(mt - 12)
         << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">" << title
         << "</text>\n";
  }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                const std::string& color, double stroke_width = 1.6,
                const std::string& dash = "") {
    out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke_width
         << "\"";
    if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << "\"";
    out_ << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      out_ << px(map_x(x_, xs[i])) << "," << px(map_y(y_, ys[i])) << " ";
    out_ << "\"/>\n";
  }

  void scatter(const std::vector<double>& xs, const std::vector<double>& ys,
               const std::string& color) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      out_ << "<circle cx=\"" << px(map_x(x_, xs[i])) << "\" cy=\"" << px(map_y(y_, ys[i]))
           << "\" r=\"3.2\" fill=\"" << color << "\"/>\n";
  }

  void label(double fx, double fy, const std::string& text, const std::string& color) {
    out_ << "<text x=\"" << px(ml + fx * (width - ml - mr)) << "\" y=\""
         << px(mt + fy * (height - mt - mb)) << "\" font-size=\"12\" font-family=\"sans-serif\" "
         << "fill=\"" << color << "\">" << text << "</text>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  Axis x_, y_;
  std::ostringstream out_;
};

inline std::vector<double> column(const Table& t, std::size_t j) {
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (const auto& row : t.rows)
    if (row[j]) v.push_back(*row[j]);
  return v;
}

}  // namespace detail_svg

// kind: "mode" (x, re, im, abs, chi), "scan" (parameter, ., norm, .),
// "trace" (t, E, dissipation).
inline void emit_plot(const Table& t, const std::string& kind, const std::string& path) {
  using namespace detail_svg;
  if (t.rows.empty()) throw std::invalid_argument("emit_plot: empty table");
  if (kind == "mode") {
    if (t.columns.size() < 5) throw std::invalid_argument("emit_plot: mode table needs 5 columns");
    const auto xs = column(t, 0), re = column(t, 1), im = column(t, 2), ab = column(t, 3),
               chi = column(t, 4);
    double lo = 0, hi = 0;
    for (auto v : re) lo = std::min(lo, v), hi = std::max(hi, v);
    for (auto v : im) lo = std::min(lo, v), hi = std::max(hi, v);
    for (auto v : ab) lo = std::min(lo, v), hi = std::max(hi, v);
    for (auto v : chi) lo = std::min(lo, v), hi = std::max(hi, v);
    Canvas c(make_axis(xs.front(), xs.back(), false), make_axis(lo, hi, false), "x",
             "eigenmode / damping", "eigenmode with damping overlay");
    c.polyline(xs, re, "#1f77b4");
    c.polyline(xs, im, "#4f9fd4");
    c.polyline(xs, ab, "#8ec7e6", 2.0);
    c.polyline(xs, chi, "#d62728", 1.8, "7,5");
    c.label(0.02, 0.05, "Re v", "#1f77b4");
    c.label(0.12, 0.05, "Im v", "#4f9fd4");
    c.label(0.22, 0.05, "|v|", "#8ec7e6");
    c.label(0.30, 0.05, "chi (dashed)", "#d62728");
    write_file(path, c.finish());
    return;
  }
  if (kind == "scan") {
    std::vector<double> xs, ys;
    for (const auto& row : t.rows)
      if (row[0] && row[2] && *row[2] > 0 && std::isfinite(*row[2])) {
        xs.push_back(*row[0]);
        ys.push_back(*row[2]);
      }
    if (xs.size() < 2) throw std::invalid_argument("emit_plot: scan table has too few rows");
    const LineFit fit = fit_loglog(xs, ys);
    Canvas c(make_axis(*std::min_element(xs.begin(), xs.end()),
                       *std::max_element(xs.begin(), xs.end()), true),
             make_axis(*std::min_element(ys.begin(), ys.end()),
                       *std::max_element(ys.begin(), ys.end()), true),
             t.columns[0], t.columns[2], "operator norm scan");
    c.scatter(xs, ys, "#1f77b4");
    std::vector<double> fx = {xs.front(), xs.back()};
    std::vector<double> fy;
    for (double x : fx) fy.push_back(std::exp(fit.intercept + fit.slope * std::log(x)));
    c.polyline(fx, fy, "#d62728", 1.4, "6,4");
    char note[64];
    std::snprintf(note, sizeof(note), "fitted exponent = %.4f", fit.slope);
    c.label(0.04, 0.08, note, "#d62728");
    write_file(path, c.finish());
    return;
  }
  if (kind == "trace") {
    std::vector<double> ts, es;
    for (const auto& row : t.rows)
      if (row[0] && row[1] && *row[1] > 0) {
        ts.push_back(*row[0]);
        es.push_back(*row[1]);
      }
    if (ts.size() < 2) throw std::invalid_argument("emit_plot: trace table has too few rows");
    Canvas c(make_axis(ts.front(), ts.back(), false),
             make_axis(*std::min_element(es.begin(), es.end()),
                       *std::max_element(es.begin(), es.end()), true),
             "t", "E(t)", "energy trace");
    c.polyline(ts, es, "#1f77b4");
    write_file(path, c.finish());
    return;
  }
  throw std::invalid_argument("emit_plot: unknown kind '" + kind + "'");
}

}  // namespace fdwave
