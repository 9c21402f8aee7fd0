// Copyright 2026 The qmpso Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qmpso::svg {

namespace {

constexpr double kWidth = 760, kHeight = 480;
constexpr double kLeft = 70, kRight = 180, kTop = 40, kBottom = 50;
constexpr const char *kPalette[] = {"#1b6ca8", "#d1495b", "#2e8b57", "#edae49",
                                    "#66457a", "#00798c", "#8c564b", "#444444"};

std::string num(double v, const char *fmt = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double pixel_lo = 0, pixel_hi = 1;

  double map(double v) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double u = ((log ? std::log10(v) : v) - a) / (b - a);
    return pixel_lo + u * (pixel_hi - pixel_lo);
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::ceil(std::log10(lo)); e <= std::floor(std::log10(hi)); ++e) {
        out.push_back(std::pow(10.0, e));
      }
    } else {
      for (int i = 0; i <= 5; ++i) out.push_back(lo + (hi - lo) * i / 5.0);
    }
    return out;
  }
};

Axis fit(std::vector<double> values, bool log, double p0, double p1) {
  Axis a;
  a.log = log;
  a.pixel_lo = p0;
  a.pixel_hi = p1;
  std::erase_if(values, [&](double v) { return !std::isfinite(v) || (log && v <= 0); });
  if (values.empty()) return a;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  a.lo = *mn;
  a.hi = *mx;
  if (log) {
    a.lo = std::pow(10.0, std::floor(std::log10(a.lo)));
    a.hi = std::pow(10.0, std::ceil(std::log10(a.hi)));
    if (a.hi <= a.lo) a.hi = a.lo * 10;
  } else if (a.hi - a.lo < 1e-12) {
    a.lo -= 0.5;
    a.hi += 0.5;
  }
  return a;
}

void frame(std::ostringstream &os, const std::string &title, const std::string &xl,
           const std::string &yl, const Axis &x, const Axis &y) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(title) << "</text>\n";
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  os << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0
     << "\" height=\"" << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : x.ticks()) {
    const double px = x.map(t);
    os << "<line x1=\"" << num(px) << "\" y1=\"" << y0 << "\" x2=\"" << num(px)
       << "\" y2=\"" << y0 + 5 << "\" stroke=\"black\"/>";
    os << "<text x=\"" << num(px) << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">"
       << num(t, "%.3g") << "</text>\n";
  }
  for (double t : y.ticks()) {
    const double py = y.map(t);
    os << "<line x1=\"" << x0 - 5 << "\" y1=\"" << num(py) << "\" x2=\"" << x0
       << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << x0 - 8 << "\" y=\"" << num(py + 4)
       << "\" text-anchor=\"end\">" << num(t, "%.3g") << "</text>\n";
  }
  os << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
  os << "<text transform=\"translate(16," << (y0 + y1) / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
}

void legend_entry(std::ostringstream &os, int i, const std::string &color,
                  const std::string &label, bool box) {
  const double lx = kWidth - kRight + 15, ly = kTop + 10 + 18 * i;
  if (box) {
    os << "<rect x=\"" << lx << "\" y=\"" << ly - 9 << "\" width=\"20\" height=\"12\" fill=\""
       << color << "\"/>";
  } else {
    os << "<line x1=\"" << lx << "\" y1=\"" << ly - 3 << "\" x2=\"" << lx + 20 << "\" y2=\""
       << ly - 3 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
  }
  os << "<text x=\"" << lx + 26 << "\" y=\"" << ly << "\">" << escape(label) << "</text>\n";
}

}  // namespace

std::string render(const LinePlot &plot) {
  std::vector<double> xs, ys;
  for (const auto &s : plot.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const Axis x = fit(xs, false, kLeft, kWidth - kRight);
  const Axis y = fit(ys, plot.log_y, kHeight - kBottom, kTop);
  std::ostringstream os;
  frame(os, plot.title, plot.x_label, plot.y_label, x, y);
  int i = 0;
  for (const auto &s : plot.series) {
    const std::string color = kPalette[i % std::size(kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (s.dashed) os << " stroke-dasharray=\"6,4\"";
    os << " points=\"";
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      const double v = plot.log_y ? std::max(s.y[k], y.lo) : s.y[k];
      if (!std::isfinite(v)) continue;
      os << num(x.map(s.x[k])) << ',' << num(y.map(v)) << ' ';
    }
    os << "\"/>\n";
    legend_entry(os, i, color, s.label, false);
    ++i;
  }
  os << "</svg>\n";
  return os.str();
}

std::string render(const HeatMap &map) {
  const Axis x = fit(map.x, false, kLeft, kWidth - kRight);
  const Axis y = fit(map.y, map.log_y, kHeight - kBottom, kTop);
  std::ostringstream os;
  frame(os, map.title, map.x_label, map.y_label, x, y);
  const auto edges = [](const std::vector<double> &c, std::size_t k, const Axis &a) {
    // Cell k spans halfway to its neighbours.
    const double v = c[k];
    const double prev = k > 0 ? c[k - 1] : v - (c.size() > 1 ? c[1] - c[0] : 1.0);
    const double next = k + 1 < c.size() ? c[k + 1] : v + (v - prev);
    if (a.log) {
      return std::pair{std::sqrt(std::max(prev, 1e-300) * v), std::sqrt(v * next)};
    }
    return std::pair{(prev + v) / 2, (v + next) / 2};
  };
  for (std::size_t r = 0; r < map.y.size() && r < map.cells.size(); ++r) {
    auto [ya, yb] = edges(map.y, r, y);
    ya = std::clamp(ya, y.lo, y.hi);
    yb = std::clamp(yb, y.lo, y.hi);
    for (std::size_t c = 0; c < map.x.size() && c < map.cells[r].size(); ++c) {
      auto [xa, xb] = edges(map.x, c, x);
      xa = std::clamp(xa, x.lo, x.hi);
      xb = std::clamp(xb, x.lo, x.hi);
      const int v = map.cells[r][c];
      const std::string color =
          v >= 0 && static_cast<std::size_t>(v) < map.colors.size() ? map.colors[v] : "#ffffff";
      const double px = x.map(xa), py = std::min(y.map(ya), y.map(yb));
      os << "<rect x=\"" << num(px) << "\" y=\"" << num(py) << "\" width=\""
         << num(x.map(xb) - px) << "\" height=\"" << num(std::abs(y.map(yb) - y.map(ya)))
         << "\" fill=\"" << color << "\"/>\n";
    }
  }
  for (std::size_t i = 0; i < map.legend.size() && i < map.colors.size(); ++i) {
    legend_entry(os, static_cast<int>(i), map.colors[i], map.legend[i], true);
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace qmpso::svg
