#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lagflow {

// Per-vertex fields are V x C with hot row-wise access; row-major storage
// keeps row(v).data() contiguous.
using MatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::VectorXd;

// Error taxonomy. The CLI exit-code contract maps onto these:
//   ConfigError -> 2, NumericalError -> 3, MissingPrereqError -> 4,
//   HypothesisError is recorded (not fatal) by report-style operations.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingPrereqError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Thrown when a paper hypothesis fails on the data (e.g. cos(theta) <= 0 on
// the support of the Psi weight). Never clamped away.
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DiffScheme { Order2, Order4 };
enum class Integrator { Euler, RK2 };

inline const char* to_string(DiffScheme s) {
  return s == DiffScheme::Order2 ? "order2" : "order4";
}
inline const char* to_string(Integrator s) {
  return s == Integrator::Euler ? "euler" : "rk2";
}
DiffScheme parse_scheme(const std::string& s);
Integrator parse_integrator(const std::string& s);

// Flat Calabi-Yau ambient: C^n with the standard J, omega and
// Omega = dz_1 ^ ... ^ dz_n. Real coordinates are interleaved
// (x_1, y_1, ..., x_n, y_n). Optional periods make the x_k directions
// periodic (flat torus ambient T^n x R^n); absent means all of C^n.
struct AmbientSpace {
  int n = 1;
  std::optional<std::vector<double>> periods;

  int real_dim() const { return 2 * n; }
  void validate() const;
};

// J acting on interleaved coordinates: J dx_k = dy_k, J dy_k = -dx_k.
inline void apply_J(const double* v, double* out, int n) {
  for (int k = 0; k < n; ++k) {
    out[2 * k] = -v[2 * k + 1];
    out[2 * k + 1] = v[2 * k];
  }
}

// omega(a,b) = sum_k (a_x b_y - a_y b_x) over complex factors.
inline double symplectic_form(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k)
    s += a[2 * k] * b[2 * k + 1] - a[2 * k + 1] * b[2 * k];
  return s;
}

// Discrete immersion of the parameter torus [0,L_0) x ... x [0,L_{n-1})
// into R^{2n}. Positions hold one fundamental cell; periodic_shifts row d
// is the constant displacement picked up when the grid wraps in direction d
// (zero for closed scenarios, the ambient period vector for graphs, and the
// in-plane period for synthetic plane patches).
struct Immersion {
  AmbientSpace ambient;
  std::vector<int> shape;           // grid resolution per parameter direction
  std::vector<double> extent;       // parameter box lengths L_d
  MatrixXd positions;               // V x 2n, vertex-major
  MatrixXd periodic_shifts;         // n x 2n

  int n() const { return ambient.n; }
  int dim() const { return ambient.real_dim(); }
  int vertex_count() const { return static_cast<int>(positions.rows()); }
  double spacing(int d) const { return extent[d] / shape[d]; }
  bool has_shifts() const { return periodic_shifts.cwiseAbs().maxCoeff() > 0; }

  void validate() const;
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Volume of the unit n-ball, n = 1, 2.
inline double unit_ball_volume(int n) { return n == 1 ? 2.0 : kPi; }

// Map an angle difference to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a;
}

}  // namespace lagflow
