#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geometry.hpp"
#include "scenarios.hpp"
#include "synthetic.hpp"

using namespace lagflow;

namespace {

GeometryCache geom(const Immersion& im,
                   DiffScheme scheme = DiffScheme::Order4) {
  GeometryCache g;
  compute_geometry(im, scheme, g);
  return g;
}

}  // namespace

TEST_CASE("scenario builders sample the analytic surfaces") {
  const Immersion circ = build_scenario(circle_spec(1.0, 64));
  CHECK(circ.vertex_count() == 64);
  for (int v = 0; v < 64; ++v)
    CHECK(circ.positions.row(v).norm() == doctest::Approx(1.0).epsilon(1e-14));

  const Immersion cliff = build_scenario(clifford_spec(1.0, 32));
  CHECK(cliff.vertex_count() == 32 * 32);
  const double u = kTwoPi * 3 / 32, v = kTwoPi * 5 / 32;
  const int idx = 3 * 32 + 5;
  CHECK(cliff.positions(idx, 0) == doctest::Approx(std::cos(u)));
  CHECK(cliff.positions(idx, 1) == doctest::Approx(std::sin(u)));
  CHECK(cliff.positions(idx, 2) == doctest::Approx(std::cos(v)));
  CHECK(cliff.positions(idx, 3) == doctest::Approx(std::sin(v)));

  const Immersion graph = build_scenario(lagrangian_graph_spec(0.1, 0.1, 32));
  CHECK(lagrangian_residual(graph) < 1e-12);
}

TEST_CASE("scenario parameter validation") {
  CHECK_THROWS_AS(build_scenario({"warp_drive", {}, {16}}), ConfigError);
  CHECK_THROWS_AS(build_scenario(circle_spec(1.0, 7)), ConfigError);
  // atan(1) + atan(1) == pi/2 violates the almost-calibrated constraint.
  CHECK_THROWS_AS(build_scenario(lagrangian_graph_spec(1.0, 1.0, 32)),
                  ConfigError);
  CHECK_THROWS_AS(build_scenario(graph_curve_spec(0.0, 32)), ConfigError);
}

TEST_CASE("lagrangian_residual: curves are trivially zero, products exact") {
  CHECK(lagrangian_residual(build_scenario(circle_spec(1.0, 32))) == 0.0);
  CHECK(lagrangian_residual(build_scenario(clifford_spec(1.0, 16))) < 1e-12);
  CHECK(lagrangian_residual(
            build_scenario(perturbed_clifford_spec(1.0, 0.05, 16))) < 1e-12);
}

TEST_CASE("lagrangian_residual flags a non-Lagrangian graph at 0.1") {
  // (x, 0.1 sin y, y, 0): omega(dF/dx, dF/dy) = 0.1 cos y.
  Immersion im;
  im.ambient.n = 2;
  im.shape = {32, 32};
  im.extent = {kTwoPi, kTwoPi};
  im.positions.resize(32 * 32, 4);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const double x = kTwoPi * i / 32, y = kTwoPi * j / 32;
      im.positions.row(i * 32 + j) << x, 0.1 * std::sin(y), y, 0.0;
    }
  im.periodic_shifts = MatrixXd::Zero(2, 4);
  im.periodic_shifts(0, 0) = kTwoPi;
  im.periodic_shifts(1, 2) = kTwoPi;
  const double res = lagrangian_residual(im);
  CHECK(res == doctest::Approx(0.1).epsilon(1e-3));

  // Invariance under a random unitary (preserves omega).
  const MatrixXd U = synthetic::random_unitary(2, 99);
  Immersion rot = im;
  rot.positions = im.positions * U.transpose();
  rot.periodic_shifts = im.periodic_shifts * U.transpose();
  CHECK(std::abs(lagrangian_residual(rot) - res) < 1e-12);
}

TEST_CASE("degenerate frames are rejected") {
  Immersion im = build_scenario(circle_spec(1.0, 16));
  im.positions.setZero();
  CHECK_THROWS_AS(lagrangian_residual(im), NumericalError);
  GeometryCache g;
  CHECK_THROWS_AS(compute_geometry(im, DiffScheme::Order4, g), NumericalError);
}

TEST_CASE("circle geometry: curvature one, H points to the center") {
  const Immersion im = build_scenario(circle_spec(1.0, 128));
  const GeometryCache g = geom(im);
  for (int v = 0; v < g.V(); v += 17) {
    CHECK(g.mean_curv.row(v).norm() == doctest::Approx(1.0).epsilon(1e-6));
    // H = -F for the unit circle.
    CHECK((g.mean_curv.row(v) + im.positions.row(v)).norm() < 1e-6);
    CHECK(g.norm_A_sq[v] == doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(g.volume == doctest::Approx(kTwoPi).epsilon(1e-6));
  CHECK(g.winding[0] == 1);
}

TEST_CASE("clifford geometry: theta = u + v + pi, |A|^2 = |H|^2 = 2") {
  const Immersion im = build_scenario(clifford_spec(1.0, 32));
  const GeometryCache g = geom(im);
  const Grid grid = Grid::of(im);
  for (int i = 0; i < 32; i += 5)
    for (int j = 0; j < 32; j += 7) {
      const int v = grid.index(i, j);
      const double want = kTwoPi * i / 32 + kTwoPi * j / 32 + kPi;
      CHECK(std::abs(wrap_angle(g.theta[v] - want)) < 1e-10);
      CHECK(g.norm_A_sq[v] == doctest::Approx(2.0).epsilon(5e-4));
      CHECK(g.mean_curv.row(v).squaredNorm() ==
            doctest::Approx(2.0).epsilon(5e-4));
    }
  CHECK(g.winding[0] == 1);
  CHECK(g.winding[1] == 1);
  CHECK(g.volume == doctest::Approx(4 * kPi * kPi).epsilon(1e-3));
}

TEST_CASE("lagrangian_graph angle matches atan(-eps cos x) + atan(-del cos y)") {
  const double eps = 0.1, del = 0.2;
  const Immersion im = build_scenario(lagrangian_graph_spec(eps, del, 32));
  const GeometryCache g = geom(im);
  const Grid grid = Grid::of(im);
  for (int i = 0; i < 32; i += 3)
    for (int j = 0; j < 32; j += 3) {
      const int v = grid.index(i, j);
      const double x = kTwoPi * i / 32, y = kTwoPi * j / 32;
      const double want =
          std::atan(-eps * std::cos(x)) + std::atan(-del * std::cos(y));
      CHECK(std::abs(wrap_angle(g.theta[v] - want)) < 1e-4);
    }
  CHECK(g.min_cos_theta > 0.9);
}

TEST_CASE("frame determinant identity e^{i theta} sqrt(det g) = det Z") {
  for (const auto& spec :
       {clifford_spec(1.0, 16), lagrangian_graph_spec(0.1, 0.1, 16)}) {
    const Immersion im = build_scenario(spec);
    const GeometryCache g = geom(im);
    for (int v = 0; v < g.V(); v += 11) {
      const auto z = complex_frame_det(g, v);
      const std::complex<double> want =
          g.sqrt_det_g[v] * std::exp(std::complex<double>(0, g.theta[v]));
      CHECK(std::abs(z - want) < 1e-10 * std::abs(z));
    }
  }
}

TEST_CASE("J maps tangent frame to the normal space on exact Lagrangians") {
  for (const auto& spec :
       {clifford_spec(1.0, 16), lagrangian_graph_spec(0.1, 0.1, 16),
        perturbed_clifford_spec(1.0, 0.05, 16)}) {
    const Immersion im = build_scenario(spec);
    const GeometryCache g = geom(im);
    double worst = 0.0;
    for (int v = 0; v < g.V(); ++v)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double dot = g.normal.row(v).segment(a * 4, 4).dot(
              g.frame.row(v).segment(b * 4, 4));
          worst = std::max(worst, std::abs(dot));
        }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("angle_gradient_residual: small on analytic scenarios") {
  // Flat line: both sides vanish identically.
  MatrixXd lineb(1, 2);
  lineb << 1, 0;
  const Immersion line =
      synthetic::plane_immersion(lineb, VectorXd::Zero(2), kTwoPi, 32);
  CHECK(angle_gradient_residual(geom(line)) == doctest::Approx(0.0));

  const Immersion c = build_scenario(circle_spec(1.0, 128));
  CHECK(angle_gradient_residual(geom(c)) < 1e-3);

  const Immersion t = build_scenario(clifford_spec(1.0, 64));
  CHECK(angle_gradient_residual(geom(t)) < 1e-3);
}

TEST_CASE("order-2 scheme: H - J grad theta converges at second order") {
  auto residual_at = [](const ScenarioSpec& spec) {
    const Immersion im = build_scenario(spec);
    GeometryCache g;
    compute_geometry(im, DiffScheme::Order2, g);
    return angle_gradient_residual(g);
  };
  struct Row {
    ScenarioSpec coarse, fine;
  };
  const Row rows[] = {
      {circle_spec(1.0, 64), circle_spec(1.0, 128)},
      {clifford_spec(1.0, 24), clifford_spec(1.0, 48)},
      {lagrangian_graph_spec(0.2, 0.2, 24),
       lagrangian_graph_spec(0.2, 0.2, 48)},
  };
  for (const auto& row : rows) {
    const double rc = residual_at(row.coarse);
    const double rf = residual_at(row.fine);
    const double ratio = rc / rf;
    CAPTURE(row.coarse.name);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("theta branch follows the previous snapshot") {
  const Immersion im = build_scenario(clifford_spec(1.0, 16));
  GeometryCache g1;
  compute_geometry(im, DiffScheme::Order4, g1);
  VectorXd prev = g1.theta.array() + kTwoPi;  // pretend earlier branch
  GeometryCache g2;
  compute_geometry(im, DiffScheme::Order4, g2, GeomDetail::Full, &prev);
  CHECK(std::abs(g2.theta[0] - prev[0]) < 1e-12);
}

TEST_CASE("laplace_beltrami reproduces the flat-torus Laplacian") {
  const Immersion im = build_scenario(clifford_spec(1.0, 48));
  const GeometryCache g = geom(im);
  VectorXd lap;
  laplace_beltrami(g, g.cos_theta, false, DiffScheme::Order2, lap);
  // On the unit Clifford torus cos(theta) = cos(u+v+pi) and
  // Lap cos = -2 cos in the induced (flat, radius-1) metric.
  double worst = 0.0;
  for (int v = 0; v < g.V(); ++v)
    worst = std::max(worst, std::abs(lap[v] + 2.0 * g.cos_theta[v]));
  CHECK(worst < 5e-3);
}
