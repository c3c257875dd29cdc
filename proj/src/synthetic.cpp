#include "synthetic.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <random>

namespace lagflow {
namespace synthetic {

namespace {

MatrixXd orthonormal_rows(const MatrixXd& B) {
  Eigen::HouseholderQR<MatrixXd> qr(B.transpose());
  MatrixXd Q = qr.householderQ() *
               MatrixXd::Identity(B.cols(), B.rows());
  return Q.transpose();
}

}  // namespace

Immersion plane_immersion(const MatrixXd& basis, const VectorXd& center,
                          double L, int N) {
  const int n = static_cast<int>(basis.rows());
  const int D = static_cast<int>(basis.cols());
  if (D != 2 * n) throw ConfigError("plane basis must be n x 2n");
  Immersion im;
  im.ambient.n = n;
  im.shape.assign(n, N);
  im.extent.assign(n, L);
  const int V = n == 1 ? N : N * N;
  im.positions.resize(V, D);
  for (int v = 0; v < V; ++v) {
    const int i = n == 1 ? v : v / N;
    const int j = n == 1 ? 0 : v % N;
    const double u0 = L * i / N - L / 2;
    const double u1 = L * j / N - L / 2;
    VectorXd p = center + u0 * basis.row(0).transpose();
    if (n == 2) p += u1 * basis.row(1).transpose();
    im.positions.row(v) = p;
  }
  im.periodic_shifts = L * basis;
  im.validate();
  return im;
}

RescaledCloud plane_cloud(const MatrixXd& basis, const VectorXd& center,
                          double L, int N, double theta_value, bool periodic) {
  const int n = static_cast<int>(basis.rows());
  const int D = static_cast<int>(basis.cols());
  RescaledCloud c;
  c.scale_type = RescaledCloud::ScaleType::Synthetic;
  c.n = n;
  const int V = n == 1 ? N : N * N;
  const double h = L / N;
  c.points.resize(V, D);
  for (int v = 0; v < V; ++v) {
    const int i = n == 1 ? v : v / N;
    const int j = n == 1 ? 0 : v % N;
    VectorXd p = center + (L * i / N - L / 2) * basis.row(0).transpose();
    if (n == 2) p += (L * j / N - L / 2) * basis.row(1).transpose();
    c.points.row(v) = p;
  }
  c.weights = VectorXd::Constant(V, std::pow(h, n));
  c.frame.resize(V, n * D);
  for (int v = 0; v < V; ++v)
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < D; ++k) c.frame(v, a * D + k) = basis(a, k);
  c.theta = VectorXd::Constant(V, theta_value);
  c.cos_theta = VectorXd::Constant(V, std::cos(theta_value));
  c.grad_v_norm = VectorXd::Zero(V);
  c.A_sq = VectorXd::Zero(V);
  c.second_fund = MatrixXd::Zero(V, n * n * n);
  c.mean_curv = MatrixXd::Zero(V, D);
  c.cell_size = VectorXd::Constant(V, h);
  if (periodic)
    c.shifts = L * basis;
  else
    c.shifts = MatrixXd::Zero(n, D);
  return c;
}

MatrixXd complex_plane_z1() {
  MatrixXd B = MatrixXd::Zero(2, 4);
  B(0, 0) = 1;
  B(1, 1) = 1;
  return B;
}

MatrixXd complex_plane_z2() {
  MatrixXd B = MatrixXd::Zero(2, 4);
  B(0, 2) = 1;
  B(1, 3) = 1;
  return B;
}

MatrixXd lagrangian_product_plane(double g1, double g2) {
  MatrixXd B = MatrixXd::Zero(2, 4);
  B(0, 0) = std::cos(g1);
  B(0, 1) = std::sin(g1);
  B(1, 2) = std::cos(g2);
  B(1, 3) = std::sin(g2);
  return B;
}

double plane_angle(const MatrixXd& basis) {
  if (basis.rows() == 1) return std::atan2(basis(0, 1), basis(0, 0));
  const std::complex<double> z00{basis(0, 0), basis(0, 1)},
      z10{basis(0, 2), basis(0, 3)}, z01{basis(1, 0), basis(1, 1)},
      z11{basis(1, 2), basis(1, 3)};
  return std::arg(z00 * z11 - z01 * z10);
}

std::pair<MatrixXd, MatrixXd> witness_plane_pair(double t0) {
  if (!(t0 > 0 && t0 < 1))
    throw ConfigError("witness pair needs 0 < theta0 weight < 1");
  const double s2 = (1 + t0 * t0) * (1 + t0 * t0) /
                    ((t0 * t0 - 1) * (t0 * t0 - 1) + 4.0);
  const double a = std::asin(std::sqrt(s2));
  auto build = [&](double phi) {
    const double cr = std::cos(phi), ci = std::sin(phi);
    MatrixXd B(2, 4);
    B.row(0) << 1, 0, t0 * cr, -ci;
    B.row(1) << 0, t0, -t0 * ci, -cr;
    MatrixXd O = orthonormal_rows(B);
    if (std::cos(plane_angle(O)) < 0) O.row(0).swap(O.row(1));
    return O;
  };
  return {build(kPi + a), build(kTwoPi - a)};
}

MatrixXd random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = {gauss(rng), gauss(rng)};
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ();
  Eigen::MatrixXcd R =
      qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const std::complex<double> d = R(k, k);
    if (std::abs(d) > 0) Q.col(k) *= d / std::abs(d);
  }
  MatrixXd U = MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      U(2 * k, 2 * l) = Q(k, l).real();
      U(2 * k, 2 * l + 1) = -Q(k, l).imag();
      U(2 * k + 1, 2 * l) = Q(k, l).imag();
      U(2 * k + 1, 2 * l + 1) = Q(k, l).real();
    }
  return U;
}

MatrixXd random_rotation(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd G(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) G(i, j) = gauss(rng);
  Eigen::HouseholderQR<MatrixXd> qr(G);
  MatrixXd Q = qr.householderQ();
  MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k)
    if (R(k, k) < 0) Q.col(k) *= -1;
  if (Q.determinant() < 0) Q.col(dim - 1) *= -1;
  return Q;
}

RescaledCloud rotate_cloud(const RescaledCloud& cloud, const MatrixXd& U) {
  RescaledCloud c = cloud;
  const int D = cloud.dim();
  c.points = cloud.points * U.transpose();
  c.mean_curv = cloud.mean_curv * U.transpose();
  for (int v = 0; v < cloud.size(); ++v)
    for (int a = 0; a < cloud.n; ++a) {
      Eigen::VectorXd e = cloud.frame.row(v).segment(a * D, D);
      c.frame.row(v).segment(a * D, D) = (U * e).transpose();
    }
  if (cloud.shifts.size() > 0) c.shifts = cloud.shifts * U.transpose();
  return c;
}

FlowTrace static_trace(const Immersion& im, const std::vector<double>& times,
                       double T_art, const VectorXd& center,
                       DiffScheme scheme) {
  if (times.empty()) throw ConfigError("static_trace needs at least one time");
  FlowTrace trace;
  trace.scenario = {"synthetic_static", {}, im.shape};
  trace.controls.scheme = scheme;
  trace.controls.until = T_art;
  trace.initial = im;
  for (size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] < T_art))
      throw ConfigError("static_trace times must precede T");
    Snapshot s;
    s.t = times[i];
    s.dt_next = i + 1 < times.size()
                    ? std::min(1e-6, 0.5 * (times[i + 1] - times[i]))
                    : 1e-6;
    s.positions = im.positions;
    s.positions_next = im.positions;
    trace.snapshots.push_back(std::move(s));
  }
  trace.termination = Termination::ResolutionExhausted;
  trace.stop_reason = "synthetic static trace";
  SingularityReport rep;
  rep.T = T_art;
  rep.reliable = true;
  rep.X0 = center;
  rep.X0_refined = center;
  rep.note = "synthetic";
  trace.singularity = rep;
  return trace;
}

double hausdorff_distance(const MatrixXd& A, const MatrixXd& B) {
  auto one_sided = [](const MatrixXd& X, const MatrixXd& Y) {
    double worst = 0.0;
    for (int i = 0; i < X.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < Y.rows(); ++j)
        best = std::min(best, (X.row(i) - Y.row(j)).squaredNorm());
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(one_sided(A, B), one_sided(B, A));
}

}  // namespace synthetic
}  // namespace lagflow
