#include "equilens_cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace equilens::cli {

namespace {

constexpr std::array<std::array<int, 3>, 8> kViridis{{{0x44, 0x01, 0x54},
                                                      {0x46, 0x32, 0x7e},
                                                      {0x36, 0x5c, 0x8d},
                                                      {0x27, 0x7f, 0x8e},
                                                      {0x1f, 0xa1, 0x87},
                                                      {0x4a, 0xc1, 0x6d},
                                                      {0xa0, 0xda, 0x39},
                                                      {0xfd, 0xe7, 0x25}}};

constexpr std::array<std::string_view, 10> kCategorical{
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 110.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fixed(double v, int digits = 2) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  std::string s = buffer;
  if (s == "-0.00" || s == "-0.000") s.erase(0, 1);
  return s;
}

std::string escape_xml(std::string_view text) {
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

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range padded_range(double lo, double hi) {
  if (!(hi > lo)) {
    const double c = std::isfinite(lo) ? lo : 0.0;
    lo = c - 0.5;
    hi = c + 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

std::string viridis(double t) {
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double pos = t * static_cast<double>(kViridis.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), kViridis.size() - 2);
  const double f = pos - static_cast<double>(i);
  char buffer[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(kViridis[i][c] + f * (kViridis[i + 1][c] - kViridis[i][c])));
  }
  std::snprintf(buffer, sizeof buffer, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buffer;
}

std::string category_color(long long index) {
  const auto size = static_cast<long long>(kCategorical.size());
  return std::string(kCategorical[static_cast<std::size_t>(((index % size) + size) % size)]);
}

std::string svg_scatter(const std::vector<ScatterPoint>& points, const ScatterOptions& options) {
  double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0, v_lo = 0.0, v_hi = 0.0;
  if (!points.empty()) {
    x_lo = x_hi = points.front().x;
    y_lo = y_hi = points.front().y;
    v_lo = v_hi = points.front().value;
    for (const auto& p : points) {
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.y);
      y_hi = std::max(y_hi, p.y);
      v_lo = std::min(v_lo, p.value);
      v_hi = std::max(v_hi, p.value);
    }
  }
  const Range xr = padded_range(x_lo, x_hi);
  const Range yr = padded_range(y_lo, y_hi);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto sy = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth, 0) + "\" height=\"" +
         fixed(kHeight, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + " " + fixed(kHeight, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
           escape_xml(options.title) + "</text>\n";
  }
  // Axes box and ticks.
  out += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(plot_w) +
         "\" height=\"" + fixed(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    const double fy = yr.lo + (yr.hi - yr.lo) * t / 4.0;
    const double px = sx(fx);
    const double py = sy(fy);
    out += "<line x1=\"" + fixed(px) + "\" y1=\"" + fixed(kTop + plot_h) + "\" x2=\"" + fixed(px) +
           "\" y2=\"" + fixed(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fixed(px) + "\" y=\"" + fixed(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + fixed(fx, 3) + "</text>\n";
    out += "<line x1=\"" + fixed(kLeft - 5) + "\" y1=\"" + fixed(py) + "\" x2=\"" + fixed(kLeft) +
           "\" y2=\"" + fixed(py) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fixed(kLeft - 8) + "\" y=\"" + fixed(py + 4) + "\" text-anchor=\"end\">" +
           fixed(fy, 3) + "</text>\n";
  }
  out += "<text x=\"" + fixed(kLeft + plot_w / 2) + "\" y=\"" + fixed(kHeight - 15) +
         "\" text-anchor=\"middle\">" + escape_xml(options.x_label) + "</text>\n";
  out += "<text x=\"18\" y=\"" + fixed(kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fixed(kTop + plot_h / 2) + ")\">" + escape_xml(options.y_label) + "</text>\n";

  auto color_of = [&](double value) {
    if (options.scale == ColorScale::categorical) return category_color(std::llround(value));
    return viridis(v_hi > v_lo ? (value - v_lo) / (v_hi - v_lo) : 0.5);
  };
  out += "<g stroke=\"none\" fill-opacity=\"0.8\">\n";
  for (const auto& p : points) {
    out += "<circle cx=\"" + fixed(sx(p.x)) + "\" cy=\"" + fixed(sy(p.y)) + "\" r=\"3\" fill=\"" +
           color_of(p.value) + "\"/>\n";
  }
  out += "</g>\n";

  // Legend.
  const double lx = kLeft + plot_w + 20;
  if (!options.color_label.empty()) {
    out += "<text x=\"" + fixed(lx) + "\" y=\"" + fixed(kTop + 10) + "\">" +
           escape_xml(options.color_label) + "</text>\n";
  }
  if (!points.empty()) {
    if (options.scale == ColorScale::categorical) {
      std::vector<long long> seen;
      for (const auto& p : points) seen.push_back(std::llround(p.value));
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (std::size_t i = 0; i < seen.size() && i < 10; ++i) {
        const double y = kTop + 28 + 18.0 * static_cast<double>(i);
        out += "<circle cx=\"" + fixed(lx + 5) + "\" cy=\"" + fixed(y - 4) + "\" r=\"5\" fill=\"" +
               category_color(seen[i]) + "\"/>\n";
        out += "<text x=\"" + fixed(lx + 15) + "\" y=\"" + fixed(y) + "\">" +
               std::to_string(seen[i]) + "</text>\n";
      }
    } else {
      for (int s = 0; s < 8; ++s) {
        const double t = 1.0 - s / 7.0;
        const double y = kTop + 20 + 20.0 * s;
        out += "<rect x=\"" + fixed(lx) + "\" y=\"" + fixed(y) + "\" width=\"14\" height=\"20\" fill=\"" +
               viridis(t) + "\"/>\n";
        if (s == 0 || s == 7) {
          out += "<text x=\"" + fixed(lx + 20) + "\" y=\"" + fixed(y + 14) + "\">" +
                 fixed(v_lo + t * (v_hi - v_lo), 3) + "</text>\n";
        }
      }
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace equilens::cli
