#include "scenarios.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace lagflow {

namespace {

double get_param(const ScenarioSpec& s, const std::string& k, double dflt,
                 bool required = false) {
  auto it = s.params.find(k);
  if (it == s.params.end()) {
    if (required)
      throw ConfigError("scenario '" + s.name + "' requires parameter '" + k +
                        "'");
    return dflt;
  }
  return it->second;
}

std::vector<int> resolve_shape(const ScenarioSpec& s, int n) {
  std::vector<int> shape = s.resolution;
  if (shape.size() == 1 && n == 2) shape.push_back(shape[0]);
  if (static_cast<int>(shape.size()) != n)
    throw ConfigError("scenario '" + s.name + "' needs " + std::to_string(n) +
                      " grid resolutions");
  for (int N : shape)
    if (N < 8) throw ConfigError("grid resolution must be at least 8");
  return shape;
}

Immersion make_curve(const ScenarioSpec& s,
                     const std::function<void(double, double*)>& f,
                     const double* shift) {
  Immersion im;
  im.ambient.n = 1;
  im.shape = resolve_shape(s, 1);
  im.extent = {kTwoPi};
  const int N = im.shape[0];
  im.positions.resize(N, 2);
  for (int i = 0; i < N; ++i) {
    double p[2];
    f(kTwoPi * i / N, p);
    im.positions(i, 0) = p[0];
    im.positions(i, 1) = p[1];
  }
  im.periodic_shifts = MatrixXd::Zero(1, 2);
  if (shift) {
    im.periodic_shifts(0, 0) = shift[0];
    im.periodic_shifts(0, 1) = shift[1];
    im.ambient.periods = std::vector<double>{shift[0]};
  }
  im.validate();
  return im;
}

Immersion make_surface(const ScenarioSpec& s,
                       const std::function<void(double, double, double*)>& f,
                       const double* shift0, const double* shift1) {
  Immersion im;
  im.ambient.n = 2;
  im.shape = resolve_shape(s, 2);
  im.extent = {kTwoPi, kTwoPi};
  const int N0 = im.shape[0], N1 = im.shape[1];
  im.positions.resize(N0 * N1, 4);
  for (int i = 0; i < N0; ++i)
    for (int j = 0; j < N1; ++j) {
      double p[4];
      f(kTwoPi * i / N0, kTwoPi * j / N1, p);
      for (int c = 0; c < 4; ++c) im.positions(i * N1 + j, c) = p[c];
    }
  im.periodic_shifts = MatrixXd::Zero(2, 4);
  if (shift0)
    for (int c = 0; c < 4; ++c) im.periodic_shifts(0, c) = shift0[c];
  if (shift1)
    for (int c = 0; c < 4; ++c) im.periodic_shifts(1, c) = shift1[c];
  if (shift0 && shift1)
    im.ambient.periods = std::vector<double>{shift0[0], shift1[2]};
  im.validate();
  return im;
}

}  // namespace

std::string ScenarioSpec::key() const {
  std::ostringstream os;
  os.precision(17);
  os << name;
  for (const auto& [k, v] : params) os << ";" << k << "=" << v;
  os << ";res=";
  for (int r : resolution) os << r << "x";
  return os.str();
}

Immersion build_scenario(const ScenarioSpec& spec) {
  if (spec.name == "circle") {
    const double r0 = get_param(spec, "r0", 1.0);
    if (!(r0 > 0)) throw ConfigError("circle: r0 must be positive");
    return make_curve(
        spec,
        [r0](double u, double* p) {
          p[0] = r0 * std::cos(u);
          p[1] = r0 * std::sin(u);
        },
        nullptr);
  }
  if (spec.name == "graph_curve") {
    const double eps = get_param(spec, "epsilon", 0.1);
    if (!(eps > 0 && eps <= 0.9))
      throw ConfigError("graph_curve: epsilon must lie in (0, 0.9]");
    const double shift[2] = {kTwoPi, 0.0};
    return make_curve(
        spec,
        [eps](double x, double* p) {
          p[0] = x;
          p[1] = -eps * std::sin(x);
        },
        shift);
  }
  if (spec.name == "clifford_torus") {
    const double r0 = get_param(spec, "r0", 1.0);
    if (!(r0 > 0)) throw ConfigError("clifford_torus: r0 must be positive");
    return make_surface(
        spec,
        [r0](double u, double v, double* p) {
          p[0] = r0 * std::cos(u);
          p[1] = r0 * std::sin(u);
          p[2] = r0 * std::cos(v);
          p[3] = r0 * std::sin(v);
        },
        nullptr, nullptr);
  }
  if (spec.name == "lagrangian_graph") {
    const double eps = get_param(spec, "epsilon", 0.1);
    const double del = get_param(spec, "delta", 0.1);
    if (!(eps > 0) || !(del > 0))
      throw ConfigError("lagrangian_graph: epsilon, delta must be positive");
    // cos(theta) > 0 needs |atan(-eps cos x) + atan(-delta cos y)| < pi/2.
    if (!(std::atan(eps) + std::atan(del) < kPi / 2))
      throw ConfigError(
          "lagrangian_graph: atan(epsilon) + atan(delta) must be < pi/2 "
          "(almost-calibrated constraint)");
    const double s0[4] = {kTwoPi, 0, 0, 0};
    const double s1[4] = {0, 0, kTwoPi, 0};
    return make_surface(
        spec,
        [eps, del](double x, double y, double* p) {
          p[0] = x;
          p[1] = -eps * std::sin(x);
          p[2] = y;
          p[3] = -del * std::sin(y);
        },
        s0, s1);
  }
  if (spec.name == "perturbed_clifford") {
    const double r0 = get_param(spec, "r0", 1.0);
    const double eps = get_param(spec, "epsilon", 0.05);
    if (!(r0 > 0)) throw ConfigError("perturbed_clifford: r0 must be positive");
    if (!(eps >= 0 && eps <= 0.3))
      throw ConfigError("perturbed_clifford: epsilon must lie in [0, 0.3]");
    // Product of two perturbed circles; products of plane curves are
    // automatically Lagrangian.
    return make_surface(
        spec,
        [r0, eps](double u, double v, double* p) {
          const double a = r0 * (1.0 + eps * std::cos(2 * u));
          const double b = r0 * (1.0 + eps * std::cos(3 * v));
          p[0] = a * std::cos(u);
          p[1] = a * std::sin(u);
          p[2] = b * std::cos(v);
          p[3] = b * std::sin(v);
        },
        nullptr, nullptr);
  }
  throw ConfigError("unknown scenario: " + spec.name);
}

ScenarioSpec circle_spec(double r0, int N) {
  return {"circle", {{"r0", r0}}, {N}};
}
ScenarioSpec graph_curve_spec(double eps, int N) {
  return {"graph_curve", {{"epsilon", eps}}, {N}};
}
ScenarioSpec clifford_spec(double r0, int N) {
  return {"clifford_torus", {{"r0", r0}}, {N, N}};
}
ScenarioSpec lagrangian_graph_spec(double eps, double delta, int N) {
  return {"lagrangian_graph", {{"epsilon", eps}, {"delta", delta}}, {N, N}};
}
ScenarioSpec perturbed_clifford_spec(double r0, double eps, int N) {
  return {"perturbed_clifford", {{"r0", r0}, {"epsilon", eps}}, {N, N}};
}

}  // namespace lagflow
