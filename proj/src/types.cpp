#include "types.hpp"

#include <cmath>

namespace lagflow {

DiffScheme parse_scheme(const std::string& s) {
  if (s == "order2") return DiffScheme::Order2;
  if (s == "order4") return DiffScheme::Order4;
  throw ConfigError("unknown differentiation scheme: " + s);
}

Integrator parse_integrator(const std::string& s) {
  if (s == "euler") return Integrator::Euler;
  if (s == "rk2") return Integrator::RK2;
  throw ConfigError("unknown integrator: " + s);
}

void AmbientSpace::validate() const {
  if (n != 1 && n != 2)
    throw ConfigError("ambient complex dimension must be 1 or 2, got " +
                      std::to_string(n));
  if (periods) {
    if (static_cast<int>(periods->size()) != n)
      throw ConfigError("ambient periods must have n entries");
    for (double p : *periods)
      if (!(p > 0)) throw ConfigError("ambient periods must be positive");
  }
}

void Immersion::validate() const {
  ambient.validate();
  if (static_cast<int>(shape.size()) != n() ||
      static_cast<int>(extent.size()) != n())
    throw ConfigError("immersion grid rank must equal complex dimension");
  long v = 1;
  for (int s : shape) {
    if (s < 8) throw ConfigError("grid resolution must be at least 8");
    v *= s;
  }
  for (double l : extent)
    if (!(l > 0)) throw ConfigError("parameter extents must be positive");
  if (positions.rows() != v || positions.cols() != dim())
    throw ConfigError("positions array has wrong shape");
  if (!positions.allFinite())
    throw NumericalError("immersion has nonfinite coordinates");
  if (periodic_shifts.rows() != n() || periodic_shifts.cols() != dim())
    throw ConfigError("periodic_shifts must be n x 2n");
}

}  // namespace lagflow
