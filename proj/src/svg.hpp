#pragma once

#include <string>
#include <vector>

namespace lagflow {
namespace svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

// Self-contained SVG line plot (axes, ticks, legend). Presentation only.
void line_plot(const std::string& path, const std::string& title,
               const std::string& xlabel, const std::string& ylabel,
               const std::vector<Series>& series);

}  // namespace svg
}  // namespace lagflow
