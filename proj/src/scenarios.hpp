#pragma once

#include <map>
#include <string>

#include "types.hpp"

namespace lagflow {

// Named analytic initial data sampled on a uniform periodic grid.
//   circle(r0, N)                 round circle in C
//   graph_curve(epsilon, N)       curve (x, -eps sin x), periodic in x
//   clifford_torus(r0, N)         (r0 e^{iu}, r0 e^{iv}) in C^2, N x N grid
//   lagrangian_graph(eps, delta, N)
//                                 graph of d(eps cos x + delta cos y),
//                                 almost calibrated for atan(eps)+atan(delta)
//                                 < pi/2
//   perturbed_clifford(r0, eps, N)
//                                 product of two perturbed circles; singular
//                                 but not almost calibrated
struct ScenarioSpec {
  std::string name;
  std::map<std::string, double> params;
  std::vector<int> resolution;

  std::string key() const;  // canonical string, used for memoization
};

Immersion build_scenario(const ScenarioSpec& spec);

// Convenience constructors used throughout the test and verify suites.
ScenarioSpec circle_spec(double r0, int N);
ScenarioSpec graph_curve_spec(double eps, int N);
ScenarioSpec clifford_spec(double r0, int N);
ScenarioSpec lagrangian_graph_spec(double eps, double delta, int N);
ScenarioSpec perturbed_clifford_spec(double r0, double eps, int N);

}  // namespace lagflow
