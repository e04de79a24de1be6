#include "lpplab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace lpplab {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Comment bodies may not contain "--".
std::string comment_safe(std::string s) {
  for (std::size_t p; (p = s.find("--")) != std::string::npos;) s.replace(p, 2, "- -");
  return s;
}

struct Frame {
  double x0, x1, y0, y1;
  int w, h;
  static constexpr int L = 70, R = 160, T = 40, B = 50;

  double px(double x) const { return L + (x - x0) / (x1 - x0) * (w - L - R); }
  double py(double y) const { return h - B - (y - y0) / (y1 - y0) * (h - T - B); }
};

std::string axes(const Frame& f, const std::string& title, const std::string& xl, const std::string& yl,
                 bool log_y) {
  std::string s;
  s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(f.w) + "\" height=\"" + std::to_string(f.h) +
       "\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(f.w / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
       escape(title) + "</text>\n";
  const double bx = Frame::L, by = f.h - Frame::B, ex = f.w - Frame::R, ey = Frame::T;
  s += "<path d=\"M" + g6(bx) + " " + g6(ey) + " V" + g6(by) + " H" + g6(ex) +
       "\" stroke=\"black\" fill=\"none\"/>\n";
  for (int q = 0; q <= 4; ++q) {
    const double xv = f.x0 + (f.x1 - f.x0) * q / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * q / 4.0;
    s += "<text x=\"" + g6(f.px(xv)) + "\" y=\"" + g6(by + 16) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + g6(xv) + "</text>\n";
    s += "<text x=\"" + g6(bx - 6) + "\" y=\"" + g6(f.py(yv) + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
         g6(log_y ? std::pow(10.0, yv) : yv) + "</text>\n";
  }
  s += "<text x=\"" + g6((bx + ex) / 2) + "\" y=\"" + g6(f.h - 12.0) +
       "\" text-anchor=\"middle\" font-size=\"12\">" + escape(xl) + "</text>\n";
  s += "<text transform=\"translate(16," + g6((by + ey) / 2) +
       ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(yl) + "</text>\n";
  return s;
}

std::string open_svg(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\" font-family=\"sans-serif\">\n";
}

}  // namespace

std::string render_svg(const LineChart& c) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double y) { return c.log_y ? std::log10(y) : y; };
  std::string data = "<!-- data\n";
  for (const auto& s : c.series) {
    data += comment_safe("series " + s.label) + "\n";
    for (std::size_t q = 0; q < s.x.size(); ++q) {
      data += g6(s.x[q]) + " " + g6(s.y[q]) + "\n";
      if (c.log_y && !(s.y[q] > 0.0)) continue;
      x0 = std::min(x0, s.x[q]);
      x1 = std::max(x1, s.x[q]);
      y0 = std::min(y0, ty(s.y[q]));
      y1 = std::max(y1, ty(s.y[q]));
    }
  }
  data += "-->\n";
  if (!(x1 > x0)) x0 -= 0.5, x1 = x0 + 1.0;
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0;
  if (!(y1 > y0)) y0 -= 0.5, y1 = y0 + 1.0;
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  const Frame f{x0, x1, y0, y1, c.width, c.height};

  std::string svg = open_svg(c.width, c.height) + data + axes(f, c.title, c.x_label, c.y_label, c.log_y);
  for (std::size_t k = 0; k < c.series.size(); ++k) {
    const auto& s = c.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (std::size_t q = 0; q < s.x.size(); ++q) {
      if (c.log_y && !(s.y[q] > 0.0)) continue;
      pts += g6(f.px(s.x[q])) + "," + g6(f.py(ty(s.y[q]))) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    const double ly = Frame::T + 14.0 * static_cast<double>(k) + 6.0;
    const double lx = c.width - Frame::R + 12.0;
    svg += "<rect x=\"" + g6(lx) + "\" y=\"" + g6(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" + color +
           "\"/>\n";
    svg += "<text x=\"" + g6(lx + 14) + "\" y=\"" + g6(ly + 1) + "\" font-size=\"10\">" + escape(s.label) +
           "</text>\n";
  }
  return svg + "</svg>\n";
}

std::string render_histogram_svg(const Histogram& h, const std::string& title, const std::string& x_label) {
  const int w = 720, ht = 440;
  const auto dens = h.density();
  const double top = dens.empty() ? 1.0 : std::max(*std::max_element(dens.begin(), dens.end()), 1e-12);
  const Frame f{h.lo(), h.hi(), 0.0, top * 1.05, w, ht};
  std::string data = "<!-- data\nbin_lo density count\n";
  for (std::size_t q = 0; q < dens.size(); ++q) {
    data += g6(h.lo() + h.bin_width() * q) + " " + g6(dens[q]) + " " + std::to_string(h.counts()[q]) + "\n";
  }
  data += "underflow " + std::to_string(h.underflow()) + "\noverflow " + std::to_string(h.overflow()) + "\n-->\n";
  std::string svg = open_svg(w, ht) + data + axes(f, title, x_label, "density", false);
  for (std::size_t q = 0; q < dens.size(); ++q) {
    const double xa = f.px(h.lo() + h.bin_width() * q), xb = f.px(h.lo() + h.bin_width() * (q + 1));
    const double ya = f.py(dens[q]), yb = f.py(0.0);
    svg += "<rect x=\"" + g6(xa) + "\" y=\"" + g6(ya) + "\" width=\"" + g6(xb - xa) + "\" height=\"" +
           g6(yb - ya) + "\" fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  return svg + "</svg>\n";
}

}  // namespace lpplab
