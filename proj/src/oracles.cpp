#include "oracles.hpp"

#include <cmath>
#include <functional>

namespace lagflow {
namespace oracles {

namespace {

// Composite Simpson on [a, b] with 2m intervals.
double simpson(const std::function<double(double)>& f, double a, double b,
               int m) {
  const int N = 2 * m;
  const double h = (b - a) / N;
  double acc = f(a) + f(b);
  for (int i = 1; i < N; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

double cn_constant(int n, int refinement) {
  if (refinement < 2) throw ConfigError("refinement must be at least 2");
  const double Y = 9.0;  // e^{-81} is far below double precision
  return 2.0 * simpson([n](double y) { return std::exp(-y * y) *
                                              std::pow(y, n + 1); },
                       0.0, Y, 64 * refinement);
}

double circle_gaussian_density(int refinement) {
  // (4 pi s)^{-1/2} e^{-r^2/(4s)} r dtheta with r = sqrt(2 s).
  const double s = 0.5;
  const double r = std::sqrt(2.0 * s);
  return simpson(
      [&](double) {
        return std::pow(4.0 * kPi * s, -0.5) * std::exp(-r * r / (4.0 * s)) * r;
      },
      0.0, kTwoPi, 16 * refinement);
}

double clifford_gaussian_density(int refinement) {
  const double s = 0.5;
  const double r = std::sqrt(2.0 * s);
  // Separable product of two circle factors.
  const double inner = simpson(
      [&](double) {
        return std::pow(4.0 * kPi * s, -0.5) * std::exp(-r * r / (4.0 * s)) * r;
      },
      0.0, kTwoPi, 16 * refinement);
  return inner * inner;
}

double plane_gaussian_mass(int n, int refinement) {
  const double s = 1.0;
  const double Y = 13.0 * std::sqrt(s);
  auto g1 = [&](double x) {
    return std::pow(4.0 * kPi * s, -0.5) * std::exp(-x * x / (4.0 * s));
  };
  const double m1 = simpson(g1, -Y, Y, 128 * refinement);
  return n == 1 ? m1 : m1 * m1;
}

double oracle_quadrature(const std::string& integrand, int refinement) {
  if (refinement < 2) throw ConfigError("refinement must be at least 2");
  auto eval = [&](int ref) -> double {
    if (integrand == "c1") return cn_constant(1, ref);
    if (integrand == "c2") return cn_constant(2, ref);
    if (integrand == "circle_density") return circle_gaussian_density(ref);
    if (integrand == "clifford_density") return clifford_gaussian_density(ref);
    if (integrand == "plane_mass_1") return plane_gaussian_mass(1, ref);
    if (integrand == "plane_mass_2") return plane_gaussian_mass(2, ref);
    throw ConfigError("unknown oracle integrand: " + integrand);
  };
  const double a = eval(refinement);
  const double b = eval(2 * refinement);
  if (std::abs(a - b) > 1e-7 * std::max(1.0, std::abs(b)))
    throw NumericalError("oracle quadrature did not converge for " +
                         integrand);
  return b;
}

}  // namespace oracles
}  // namespace lagflow
