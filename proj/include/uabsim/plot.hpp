#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace uabsim {

struct PlotSeries {
  std::string label;
  std::vector<double> values;
  // optional min/max band around the values (same length when present)
  std::vector<double> band_lo, band_hi;
};

// Minimal static SVG line chart; enough for return/FSE/AOC curves.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series) {
  if (series.empty()) throw std::invalid_argument("no series to plot");
  constexpr int kW = 720, kH = 440;
  constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  const double plot_w = kW - kLeft - kRight;
  const double plot_h = kH - kTop - kBottom;

  size_t n_max = 1;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    n_max = std::max(n_max, s.values.size());
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (double v : s.band_lo) lo = std::min(lo, v);
    for (double v : s.band_hi) hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    hi = lo + 1.0;
    lo -= 1.0;
  }
  const auto x_of = [&](size_t i) {
    return kLeft + (n_max > 1 ? plot_w * i / (n_max - 1) : plot_w / 2);
  };
  const auto y_of = [&](double v) { return kTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plot: " + path);
  char buf[512];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\""
      << kH << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">%s</text>\n",
                kW / 2, title.c_str());
  out << buf;
  // axes
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                kLeft, kTop + plot_h, kLeft + plot_w, kTop + plot_h);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                kLeft, kTop, kLeft, kTop + plot_h);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"%d\" font-size=\"12\" text-anchor=\"middle\">%s</text>\n",
                kW / 2, kH - 14, x_label.c_str());
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"18\" y=\"%d\" font-size=\"12\" text-anchor=\"middle\" "
                "transform=\"rotate(-90 18 %d)\">%s</text>\n",
                kH / 2, kH / 2, y_label.c_str());
  out << buf;
  // y tick labels
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"end\">%.3g</text>\n",
                  kLeft - 6, y_of(v) + 3, v);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"middle\">0</text>\n",
                kLeft, kTop + plot_h + 14);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"10\" text-anchor=\"middle\">%zu</text>\n",
                kLeft + plot_w, kTop + plot_h + 14, n_max - 1);
  out << buf;

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % 6];
    if (!s.band_lo.empty() && s.band_lo.size() == s.values.size() &&
        s.band_hi.size() == s.values.size()) {
      out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
      for (size_t i = 0; i < s.values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x_of(i), y_of(s.band_hi[i]));
        out << buf;
      }
      for (size_t i = s.values.size(); i-- > 0;) {
        std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x_of(i), y_of(s.band_lo[i]));
        out << buf;
      }
      out << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < s.values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x_of(i), y_of(s.values[i]));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"%s\">%s</text>\n",
                  kLeft + plot_w - 150.0, kTop + 16.0 + 14.0 * si, color, s.label.c_str());
    out << buf;
  }
  out << "</svg>\n";
}

}  // namespace uabsim
