#pragma once

// Static SVG figures: trajectories over obstacle outlines, distance against
// time, and the curvature/distance overlay.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "wavepursuit/analysis.hpp"
#include "wavepursuit/environment.hpp"
#include "wavepursuit/error.hpp"
#include "wavepursuit/game.hpp"

namespace wavepursuit {

enum class FigureKind { Trajectories, Distance, CurvatureOverlay };

struct FigureSeries {
  std::string label;
  const GameTrace* trace = nullptr;
};

namespace detail {

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

inline std::string fixed(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Linear map from a data box to a pixel box with y pointing up.
struct Frame {
  double x0, x1, y0, y1;      // data
  double left, top, w, h;     // pixels
  double px(double x) const { return left + (x - x0) / (x1 - x0) * w; }
  double py(double y) const { return top + h - (y - y0) / (y1 - y0) * h; }
};

inline std::string polyline(const std::vector<Vec2>& pts, const Frame& f, const std::string& color,
                            const std::string& cls, const std::string& extra = "") {
  std::string out = "<polyline class=\"" + cls + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"" + extra +
                    " points=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    out += (k ? " " : "") + fixed(f.px(pts[k].x)) + "," + fixed(f.py(pts[k].y));
  }
  return out + "\"/>\n";
}

inline std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  std::string out = "<rect class=\"axes\" x=\"" + fixed(f.left) + "\" y=\"" + fixed(f.top) + "\" width=\"" + fixed(f.w) +
                    "\" height=\"" + fixed(f.h) + "\" fill=\"none\" stroke=\"#000\"/>\n";
  out += "<text x=\"" + fixed(f.left + f.w / 2) + "\" y=\"" + fixed(f.top + f.h + 32) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + escape(xlabel) + "</text>\n";
  out += "<text x=\"" + fixed(f.left - 40) + "\" y=\"" + fixed(f.top + f.h / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 " + fixed(f.left - 40) + " " +
         fixed(f.top + f.h / 2) + ")\">" + escape(ylabel) + "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
    out += "<text x=\"" + fixed(f.px(xv)) + "\" y=\"" + fixed(f.top + f.h + 16) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + fixed(xv) + "</text>\n";
    out += "<text x=\"" + fixed(f.left - 6) + "\" y=\"" + fixed(f.py(yv) + 3) +
           "\" text-anchor=\"end\" font-size=\"10\">" + fixed(yv) + "</text>\n";
  }
  return out;
}

inline std::string legend(const std::vector<std::pair<std::string, std::string>>& items, double x, double y) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    const double yy = y + 16.0 * double(k);
    out += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(yy) + "\" x2=\"" + fixed(x + 20) + "\" y2=\"" + fixed(yy) +
           "\" stroke=\"" + items[k].second + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fixed(x + 26) + "\" y=\"" + fixed(yy + 4) + "\" font-size=\"11\">" + escape(items[k].first) +
           "</text>\n";
  }
  return out;
}

inline std::string document(double width, double height, const std::string& title, const std::string& body) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width) +
         "\" height=\"" + fixed(height) + "\" viewBox=\"0 0 " + fixed(width) + " " + fixed(height) + "\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n<text x=\"" + fixed(width / 2) +
         "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n" + body + "</svg>\n";
}

inline void require_duration(const std::vector<FigureSeries>& series) {
  if (series.empty()) throw Error(ErrorCode::ValidationError, "no traces to plot");
  for (const auto& s : series) {
    if (!s.trace || s.trace->records.size() < 2) {
      throw Error(ErrorCode::ValidationError, "trace '" + s.label + "' has no duration to plot");
    }
  }
}

}  // namespace detail

/// Both agents' paths for every trace. Obstacles and the workspace outline are
/// drawn when an environment spec is given; otherwise the data bounds are used.
inline std::string render_trajectories(const std::vector<FigureSeries>& series, const std::optional<EnvironmentSpec>& env,
                                       const std::string& title = "trajectories") {
  detail::require_duration(series);
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (env) {
    x1 = env->width;
    y1 = env->height;
  } else {
    x0 = y0 = std::numeric_limits<double>::infinity();
    x1 = y1 = -std::numeric_limits<double>::infinity();
    for (const auto& s : series) {
      for (const auto& r : s.trace->records) {
        for (const Vec2& p : {r.pursuer, r.evader}) {
          x0 = std::min(x0, p.x), x1 = std::max(x1, p.x), y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
        }
      }
    }
    if (x1 - x0 < 1e-9) x1 = x0 + 1.0;
    if (y1 - y0 < 1e-9) y1 = y0 + 1.0;
  }
  const double plot = 480.0;
  const double scale = plot / std::max(x1 - x0, y1 - y0);
  const detail::Frame f{x0, x1, y0, y1, 60.0, 40.0, (x1 - x0) * scale, (y1 - y0) * scale};
  std::string body = detail::axes(f, "x [m]", "y [m]");
  if (env) {
    for (const auto& shape : env->obstacles) {
      if (const auto* r = std::get_if<Rect>(&shape)) {
        body += "<rect class=\"obstacle\" x=\"" + detail::fixed(f.px(r->min.x)) + "\" y=\"" + detail::fixed(f.py(r->max.y)) +
                "\" width=\"" + detail::fixed((r->max.x - r->min.x) * scale) + "\" height=\"" +
                detail::fixed((r->max.y - r->min.y) * scale) + "\" fill=\"#ccc\" stroke=\"#444\"/>\n";
      } else {
        const auto& c = std::get<Circle>(shape);
        body += "<circle class=\"obstacle\" cx=\"" + detail::fixed(f.px(c.center.x)) + "\" cy=\"" +
                detail::fixed(f.py(c.center.y)) + "\" r=\"" + detail::fixed(c.radius * scale) +
                "\" fill=\"#ccc\" stroke=\"#444\"/>\n";
      }
    }
  }
  std::vector<std::pair<std::string, std::string>> items;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const std::string color = detail::kPalette[k % std::size(detail::kPalette)];
    std::vector<Vec2> p, e;
    for (const auto& r : series[k].trace->records) {
      p.push_back(r.pursuer);
      e.push_back(r.evader);
    }
    body += detail::polyline(p, f, color, "pursuer");
    body += detail::polyline(e, f, color, "evader", " stroke-dasharray=\"4 3\"");
    items.emplace_back(series[k].label + " pursuer", color);
  }
  body += detail::legend(items, f.left + f.w + 16, f.top + 10);
  return detail::document(f.left + f.w + 200, f.top + f.h + 50, title, body);
}

inline std::string render_distance(const std::vector<FigureSeries>& series, const std::string& title = "relative distance") {
  detail::require_duration(series);
  double t1 = 0, d1 = 0;
  for (const auto& s : series) {
    for (const auto& r : s.trace->records) t1 = std::max(t1, r.t), d1 = std::max(d1, r.distance);
  }
  if (t1 <= 0) t1 = 1;
  if (d1 <= 0) d1 = 1;
  const detail::Frame f{0, t1, 0, d1 * 1.05, 60.0, 40.0, 560.0, 300.0};
  std::string body = detail::axes(f, "t [s]", "distance [m]");
  std::vector<std::pair<std::string, std::string>> items;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const std::string color = detail::kPalette[k % std::size(detail::kPalette)];
    std::vector<Vec2> pts;
    for (const auto& r : series[k].trace->records) pts.push_back({r.t, r.distance});
    body += detail::polyline(pts, f, color, "distance");
    items.emplace_back(series[k].label, color);
  }
  body += detail::legend(items, f.left + f.w + 16, f.top + 10);
  return detail::document(f.left + f.w + 180, f.top + f.h + 50, title, body);
}

/// Normalized evader curvature and normalized distance on a shared time axis.
inline std::string render_curvature_overlay(const GameTrace& trace, const CurvatureReport& report,
                                            const std::string& title = "curvature and distance") {
  detail::require_duration({{"trace", &trace}});
  const double t1 = std::max(trace.records.back().t, 1e-9);
  double dmax = 0;
  for (const double d : report.distance) dmax = std::max(dmax, d);
  if (dmax <= 0) dmax = 1;
  const detail::Frame f{0, t1, 0, 1.05, 60.0, 40.0, 560.0, 300.0};
  std::string body = detail::axes(f, "t [s]", "normalized value");
  std::vector<Vec2> kappa, dist;
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    kappa.push_back({trace.records[k].t, report.curvature[k]});
    dist.push_back({trace.records[k].t, report.distance[k] / dmax});
  }
  body += detail::polyline(kappa, f, detail::kPalette[3], "curvature");
  body += detail::polyline(dist, f, detail::kPalette[0], "distance");
  body += detail::legend({{"evader curvature", detail::kPalette[3]}, {"distance / max", detail::kPalette[0]}},
                         f.left + f.w + 16, f.top + 10);
  return detail::document(f.left + f.w + 180, f.top + f.h + 50, title, body);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::IOError, "write failed for '" + path + "'");
}

}  // namespace wavepursuit
