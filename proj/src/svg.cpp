#include "targetbench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "targetbench/error.hpp"

namespace targetbench {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 770.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 450.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  double y_min = x_min;
  double y_max = -x_min;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      fail("write_line_plot_svg: series x/y length mismatch");
    if (!s.lo.empty() && (s.lo.size() != s.x.size() || s.hi.size() != s.x.size()))
      fail("write_line_plot_svg: band length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
      if (!s.lo.empty()) {
        y_min = std::min(y_min, s.lo[i]);
        y_max = std::max(y_max, s.hi[i]);
      }
    }
  }
  if (!std::isfinite(x_min) || !std::isfinite(y_min))
    fail("write_line_plot_svg: no data points");
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max == y_min) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double x_pad = 0.04 * (x_max - x_min);
  const double y_pad = 0.08 * (y_max - y_min);
  x_min -= x_pad;
  x_max += x_pad;
  y_min -= y_pad;
  y_max += y_pad;

  auto sx = [&](double v) {
    return kLeft + (v - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  auto sy = [&](double v) {
    return kBottom - (v - y_min) / (y_max - y_min) * (kBottom - kTop);
  };

  std::ofstream out(path);
  if (!out) fail("cannot open file for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(kWidth / 2)
      << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"17\">"
      << escape(title) << "</text>\n";

  // Gridlines and tick labels, five per axis.
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_min + (x_max - x_min) * t / 4.0;
    const double fy = y_min + (y_max - y_min) * t / 4.0;
    const double px = sx(fx);
    const double py = sy(fy);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(kTop) << "\" x2=\""
        << fmt(px) << "\" y2=\"" << fmt(kBottom)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(py) << "\" x2=\""
        << fmt(kRight) << "\" y2=\"" << fmt(py)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(kBottom + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << tick_label(fx) << "</text>\n";
    out << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << tick_label(fy) << "</text>\n";
  }

  out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom) << "\" x2=\""
      << fmt(kRight) << "\" y2=\"" << fmt(kBottom)
      << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\""
      << fmt(kLeft) << "\" y2=\"" << fmt(kBottom)
      << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  out << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\""
      << fmt(kBottom + 40)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << escape(x_label) << "</text>\n";
  out << "<text x=\"20\" y=\"" << fmt((kTop + kBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\" transform=\"rotate(-90 20 "
      << fmt((kTop + kBottom) / 2) << ")\">" << escape(y_label) << "</text>\n";

  for (const auto& s : series) {
    if (!s.lo.empty() && s.x.size() > 1) {
      out << "<path d=\"M";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << ' ' << fmt(sx(s.x[i])) << ' ' << fmt(sy(s.hi[i]));
      for (std::size_t i = s.x.size(); i-- > 0;)
        out << " L " << fmt(sx(s.x[i])) << ' ' << fmt(sy(s.lo[i]));
      out << " Z\" fill=\"" << s.color << "\" fill-opacity=\"0.15\" "
             "stroke=\"none\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) out << ' ';
      out << fmt(sx(s.x[i])) << ',' << fmt(sy(s.y[i]));
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << "<circle cx=\"" << fmt(sx(s.x[i])) << "\" cy=\""
          << fmt(sy(s.y[i])) << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    }
  }

  double legend_y = kTop + 12;
  for (const auto& s : series) {
    out << "<line x1=\"" << fmt(kRight - 150) << "\" y1=\"" << fmt(legend_y)
        << "\" x2=\"" << fmt(kRight - 120) << "\" y2=\"" << fmt(legend_y)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(kRight - 114) << "\" y=\"" << fmt(legend_y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.label)
        << "</text>\n";
    legend_y += 18;
  }

  out << "</svg>\n";
  if (!out) fail("failed writing SVG: " + path);
}

}  // namespace targetbench
