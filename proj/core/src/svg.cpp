#include "imet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace imet {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  const double W = opt.width, H = opt.height;
  const double left = 70, right = 150, top = 40, bottom = 50;
  auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (opt.log_y && s.y[i] <= 0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (std::isfinite(opt.reference_y) && (!opt.log_y || opt.reference_y > 0)) {
    y0 = std::min(y0, ty(opt.reference_y));
    y1 = std::max(y1, ty(opt.reference_y));
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return H - bottom - (ty(y) - y0) / (y1 - y0) * (H - top - bottom); };
  auto py_raw = [&](double v) { return H - bottom - (v - y0) / (y1 - y0) * (H - top - bottom); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(W) + "\" height=\"" + fixed(H) +
                  "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fixed(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(opt.title) + "</text>\n";
  s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(H - bottom) + "\" x2=\"" + fixed(W - right) + "\" y2=\"" +
       fixed(H - bottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(left) + "\" y2=\"" + fixed(H - bottom) +
       "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5, yv = y0 + (y1 - y0) * k / 5;
    s += "<text x=\"" + fixed(px(xv)) + "\" y=\"" + fixed(H - bottom + 16) + "\" text-anchor=\"middle\">" + num(xv) +
         "</text>\n";
    s += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(py_raw(yv) + 4) + "\" text-anchor=\"end\">" +
         (opt.log_y ? "1e" + num(yv) : num(yv)) + "</text>\n";
  }
  s += "<text x=\"" + fixed((left + W - right) / 2) + "\" y=\"" + fixed(H - 12) + "\" text-anchor=\"middle\">" +
       escape(opt.x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + fixed((top + H - bottom) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       escape(opt.y_label) + "</text>\n";
  if (std::isfinite(opt.reference_y) && (!opt.log_y || opt.reference_y > 0))
    s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(py(opt.reference_y)) + "\" x2=\"" + fixed(W - right) +
         "\" y2=\"" + fixed(py(opt.reference_y)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& ser = series[k];
    const std::string color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(ser.x.size(), ser.y.size()); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i]) || (opt.log_y && ser.y[i] <= 0)) continue;
      pts += fixed(px(ser.x[i])) + "," + fixed(py(ser.y[i])) + " ";
      s += "<circle cx=\"" + fixed(px(ser.x[i])) + "\" cy=\"" + fixed(py(ser.y[i])) + "\" r=\"2.5\" fill=\"" + color +
           "\"/>\n";
    }
    if (!ser.markers_only && !pts.empty())
      s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    const double ly = top + 10 + 18.0 * k;
    s += "<rect x=\"" + fixed(W - right + 12) + "\" y=\"" + fixed(ly - 8) + "\" width=\"12\" height=\"3\" fill=\"" +
         color + "\"/>\n";
    s += "<text x=\"" + fixed(W - right + 30) + "\" y=\"" + fixed(ly) + "\">" + escape(ser.name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace imet
