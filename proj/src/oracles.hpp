#pragma once

#include <string>

#include "types.hpp"

namespace lagflow {
namespace oracles {

// Brute-force quadrature oracles that mint every derived expectation used by
// the verify suites, kept independent of the surface-quadrature code paths
// they check.

// c(n) = 2 int_0^inf e^{-y^2} y^{n+1} dy. Analytically Gamma(n/2 + 1):
// c(1) = sqrt(pi)/2, c(2) = 1.
double cn_constant(int n, int refinement);

// Gaussian density of the exact shrinkers at the singular spacetime point,
// by direct quadrature of the co-area form (values sqrt(2 pi / e) and
// 2 pi / e).
double circle_gaussian_density(int refinement);
double clifford_gaussian_density(int refinement);

// int over a flat n-plane through the kernel center of the backward heat
// kernel; equals 1.
double plane_gaussian_mass(int n, int refinement);

// Closed-form shrinker laws.
inline double shrinker_radius(double r0, double t) {
  return std::sqrt(std::max(r0 * r0 - 2.0 * t, 0.0));
}
inline double shrinker_extinction_time(double r0) { return 0.5 * r0 * r0; }

// Named dispatch with a refinement-convergence guard: evaluates at
// `refinement` and 2x and throws NumericalError when they disagree beyond
// 1e-7. Names: "c1", "c2", "circle_density", "clifford_density",
// "plane_mass_1", "plane_mass_2".
double oracle_quadrature(const std::string& integrand, int refinement);

}  // namespace oracles
}  // namespace lagflow
