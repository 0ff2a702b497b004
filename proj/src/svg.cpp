#include "soilml/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "soilml/errors.hpp"

namespace soilml::svg {

namespace {

constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 48;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Scale {
  double lo = 0.0, hi = 1.0;
  double px0 = 0.0, px1 = 1.0;

  double operator()(double v) const {
    if (hi == lo) return 0.5 * (px0 + px1);
    return px0 + (v - lo) / (hi - lo) * (px1 - px0);
  }
};

void pad_range(double& lo, double& hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = 0.0;
    hi = 1.0;
    return;
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
    return;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
}

void draw_frame(std::string& out, const std::string& title,
                const std::string& x_label, const std::string& y_label,
                const Scale& sx, const Scale& sy, int width, int height) {
  out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(width / 2) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + esc(title) +
         "</text>\n";

  // axes
  out += "<line x1=\"" + fmt(sx.px0) + "\" y1=\"" + fmt(sy.px0) + "\" x2=\"" +
         fmt(sx.px1) + "\" y2=\"" + fmt(sy.px0) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + fmt(sx.px0) + "\" y1=\"" + fmt(sy.px0) + "\" x2=\"" +
         fmt(sx.px0) + "\" y2=\"" + fmt(sy.px1) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double f = static_cast<double>(i) / n_ticks;
    const double xv = sx.lo + f * (sx.hi - sx.lo);
    const double xp = sx(xv);
    out += "<line x1=\"" + fmt(xp) + "\" y1=\"" + fmt(sy.px0) + "\" x2=\"" +
           fmt(xp) + "\" y2=\"" + fmt(sy.px0 + 4) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(xp) + "\" y=\"" + fmt(sy.px0 + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + fmt(xv) + "</text>\n";
    const double yv = sy.lo + f * (sy.hi - sy.lo);
    const double yp = sy(yv);
    out += "<line x1=\"" + fmt(sx.px0 - 4) + "\" y1=\"" + fmt(yp) + "\" x2=\"" +
           fmt(sx.px0) + "\" y2=\"" + fmt(yp) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(sx.px0 - 7) + "\" y=\"" + fmt(yp + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + fmt(yv) + "</text>\n";
  }

  out += "<text x=\"" + std::to_string(width / 2) + "\" y=\"" +
         std::to_string(height - 8) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + esc(x_label) +
         "</text>\n";
  out += "<text x=\"16\" y=\"" + std::to_string(height / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " +
         std::to_string(height / 2) + ")\">" + esc(y_label) + "</text>\n";
}

std::string open_svg(int width, int height) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       const std::vector<Series>& series, int width,
                       int height) {
  if (series.empty()) throw ValidationError("line_chart: no series");
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw ValidationError("line_chart: series '" + s.name +
                            "' has mismatched x/y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      ylo = std::min(ylo, s.y[i]);
      yhi = std::max(yhi, s.y[i]);
    }
  }
  pad_range(xlo, xhi);
  pad_range(ylo, yhi);

  Scale sx{xlo, xhi, static_cast<double>(kMarginLeft),
           static_cast<double>(width - kMarginRight)};
  Scale sy{ylo, yhi, static_cast<double>(height - kMarginBottom),
           static_cast<double>(kMarginTop)};

  std::string out = open_svg(width, height);
  draw_frame(out, title, x_label, y_label, sx, sy, width, height);

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) points += ' ';
      points += fmt(sx(s.x[i])) + "," + fmt(sy(s.y[i]));
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const double ly = kMarginTop + 14.0 * static_cast<double>(si);
    out += "<line x1=\"" + fmt(width - kMarginRight - 110.0) + "\" y1=\"" +
           fmt(ly) + "\" x2=\"" + fmt(width - kMarginRight - 90.0) + "\" y2=\"" +
           fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt(width - kMarginRight - 84.0) + "\" y=\"" +
           fmt(ly + 4) + "\" font-size=\"11\">" + esc(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<Bar>& bars, int width, int height) {
  if (bars.empty()) throw ValidationError("bar_chart: no bars");
  double ylo = 0.0, yhi = 0.0;
  for (const auto& b : bars) {
    yhi = std::max(yhi, b.value + b.error);
    ylo = std::min(ylo, b.value - b.error);
  }
  pad_range(ylo, yhi);
  if (ylo > 0.0) ylo = 0.0;

  Scale sy{ylo, yhi, static_cast<double>(height - kMarginBottom),
           static_cast<double>(kMarginTop)};
  Scale sx{0.0, static_cast<double>(bars.size()),
           static_cast<double>(kMarginLeft),
           static_cast<double>(width - kMarginRight)};

  std::string out = open_svg(width, height);
  draw_frame(out, title, "", y_label, sx, sy, width, height);

  const double slot = (sx.px1 - sx.px0) / static_cast<double>(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const char* color = kPalette[i % (sizeof kPalette / sizeof *kPalette)];
    const double x0 = sx.px0 + slot * (static_cast<double>(i) + 0.2);
    const double w = slot * 0.6;
    const double y = sy(std::max(0.0, b.value));
    const double h = std::abs(sy(b.value) - sy(0.0));
    out += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y) + "\" width=\"" +
           fmt(w) + "\" height=\"" + fmt(h) + "\" fill=\"" + color + "\"/>\n";
    if (b.error > 0.0) {
      const double cx = x0 + 0.5 * w;
      out += "<line x1=\"" + fmt(cx) + "\" y1=\"" + fmt(sy(b.value - b.error)) +
             "\" x2=\"" + fmt(cx) + "\" y2=\"" + fmt(sy(b.value + b.error)) +
             "\" stroke=\"black\" stroke-width=\"1\"/>\n";
      out += "<line x1=\"" + fmt(cx - 4) + "\" y1=\"" +
             fmt(sy(b.value + b.error)) + "\" x2=\"" + fmt(cx + 4) + "\" y2=\"" +
             fmt(sy(b.value + b.error)) + "\" stroke=\"black\"/>\n";
      out += "<line x1=\"" + fmt(cx - 4) + "\" y1=\"" +
             fmt(sy(b.value - b.error)) + "\" x2=\"" + fmt(cx + 4) + "\" y2=\"" +
             fmt(sy(b.value - b.error)) + "\" stroke=\"black\"/>\n";
    }
    out += "<text x=\"" + fmt(x0 + 0.5 * w) + "\" y=\"" +
           fmt(sy.px0 + 32.0) + "\" text-anchor=\"middle\" font-size=\"11\">" +
           esc(b.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw ValidationError("write failed for " + path);
}

}  // namespace soilml::svg
