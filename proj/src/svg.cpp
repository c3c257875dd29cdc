#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "types.hpp"

namespace lagflow {
namespace svg {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                         "#9467bd", "#ff7f0e", "#8c564b"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void grow(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
  }
};

}  // namespace

void line_plot(const std::string& path, const std::string& title,
               const std::string& xlabel, const std::string& ylabel,
               const std::vector<Series>& series) {
  const int W = 720, H = 480, ML = 70, MR = 20, MT = 40, MB = 50;
  Range rx, ry;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      rx.grow(s.x[i]);
      ry.grow(s.y[i]);
    }
  if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo))
    throw ConfigError("plot has no finite data");
  rx.pad();
  ry.pad();

  auto px = [&](double x) {
    return ML + (x - rx.lo) / (rx.hi - rx.lo) * (W - ML - MR);
  };
  auto py = [&](double y) {
    return H - MB - (y - ry.lo) / (ry.hi - ry.lo) * (H - MT - MB);
  };

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
      << "' height='" << H << "' viewBox='0 0 " << W << " " << H << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<text x='" << W / 2 << "' y='22' text-anchor='middle' "
      << "font-family='sans-serif' font-size='15'>" << title << "</text>\n";

  // Axes with 5 ticks each.
  out << "<g stroke='black' stroke-width='1'>\n";
  out << "<line x1='" << ML << "' y1='" << H - MB << "' x2='" << W - MR
      << "' y2='" << H - MB << "'/>\n";
  out << "<line x1='" << ML << "' y1='" << MT << "' x2='" << ML << "' y2='"
      << H - MB << "'/>\n</g>\n";
  out << "<g font-family='sans-serif' font-size='11'>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = rx.lo + (rx.hi - rx.lo) * k / 4;
    const double yv = ry.lo + (ry.hi - ry.lo) * k / 4;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", xv);
    out << "<text x='" << px(xv) << "' y='" << H - MB + 16
        << "' text-anchor='middle'>" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", yv);
    out << "<text x='" << ML - 6 << "' y='" << py(yv) + 4
        << "' text-anchor='end'>" << buf << "</text>\n";
    out << "<line x1='" << px(xv) << "' y1='" << H - MB << "' x2='" << px(xv)
        << "' y2='" << H - MB + 4 << "' stroke='black'/>\n";
    out << "<line x1='" << ML - 4 << "' y1='" << py(yv) << "' x2='" << ML
        << "' y2='" << py(yv) << "' stroke='black'/>\n";
  }
  out << "<text x='" << (ML + W - MR) / 2 << "' y='" << H - 12
      << "' text-anchor='middle'>" << xlabel << "</text>\n";
  out << "<text x='16' y='" << (MT + H - MB) / 2
      << "' text-anchor='middle' transform='rotate(-90 16 "
      << (MT + H - MB) / 2 << ")'>" << ylabel << "</text>\n";
  out << "</g>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kColors[si % 6];
    out << "<polyline fill='none' stroke='" << color
        << "' stroke-width='1.5' points='";
    for (size_t i = 0; i < s.x.size(); ++i)
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    out << "'/>\n";
    out << "<text x='" << W - MR - 6 << "' y='" << MT + 16 + 16 * si
        << "' text-anchor='end' font-family='sans-serif' font-size='12' fill='"
        << color << "'>" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace svg
}  // namespace lagflow
