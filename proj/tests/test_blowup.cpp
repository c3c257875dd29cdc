#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blowup.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace lagflow;

namespace {

const FlowTrace& circle_trace() {
  static const FlowTrace trace = [] {
    FlowControls controls;
    return run(build_scenario(circle_spec(1.0, 128)), controls,
               circle_spec(1.0, 128));
  }();
  return trace;
}

const FlowTrace& clifford_trace() {
  static const FlowTrace trace = [] {
    FlowControls controls;
    return run(build_scenario(clifford_spec(1.0, 24)), controls,
               clifford_spec(1.0, 24));
  }();
  return trace;
}

const FlowTrace& graph_trace() {
  static const FlowTrace trace = [] {
    FlowControls controls;
    controls.until = 0.3;
    return run(build_scenario(lagrangian_graph_spec(0.1, 0.1, 24)), controls,
               lagrangian_graph_spec(0.1, 0.1, 24));
  }();
  return trace;
}

MatrixXd real_plane_basis() {
  MatrixXd B = MatrixXd::Zero(2, 4);
  B(0, 0) = 1;
  B(1, 2) = 1;
  return B;
}

}  // namespace

TEST_CASE("lambda_rescale: identity scaling recenters the snapshot") {
  const auto& trace = circle_trace();
  const RescaledCloud c = lambda_rescale(trace, 1.0, -0.2);
  const int idx = trace.nearest_snapshot(trace.singularity->T - 0.2);
  const double want = trace.snapshots[idx].positions.row(3).norm();
  CHECK(c.points.row(3).norm() == doctest::Approx(want).epsilon(1e-6));
  CHECK(c.t_source == trace.snapshots[idx].t);
}

TEST_CASE("lambda_rescale: circle at lambda=2, t=-1 is the sqrt(2) circle") {
  const auto& trace = circle_trace();
  const RescaledCloud c = lambda_rescale(trace, 2.0, -1.0);
  const double exact = 2.0 * oracles::shrinker_radius(1.0, c.t_source);
  for (int v = 0; v < c.size(); v += 13) {
    CHECK(std::abs(c.points.row(v).norm() - exact) < 1e-3);
    CHECK(std::abs(c.points.row(v).norm() - std::sqrt(2.0)) < 0.03);
  }
  // Weights scale by lambda^n: total length = 2 pi * radius.
  CHECK(c.weights.sum() == doctest::Approx(kTwoPi * exact).epsilon(1e-3));
  CHECK_THROWS_AS(lambda_rescale(trace, 2.0, +1.0), ConfigError);
  CHECK_THROWS_AS(lambda_rescale(trace, 1e9, -1e9), ConfigError);
}

TEST_CASE("lambda_rescale at the self-similar scale gives the unit clifford") {
  const auto& trace = clifford_trace();
  const double T = trace.singularity->T;
  const int idx = trace.nearest_snapshot(0.6 * T);
  const double t_src = trace.snapshots[idx].t;
  const double lam = 1.0 / std::sqrt(2.0 * (T - t_src));
  const RescaledCloud c =
      lambda_rescale(trace, lam, lam * lam * (t_src - T));
  for (int v = 0; v < c.size(); v += 37)
    for (int f = 0; f < 2; ++f) {
      const double r =
          std::hypot(c.points(v, 2 * f), c.points(v, 2 * f + 1));
      CHECK(std::abs(r - 1.0) < 2e-3);
    }
}

TEST_CASE("time_rescale: shrinkers become static unit shapes") {
  const TimeRescaleResult rc = time_rescale(circle_trace());
  CHECK(rc.max_identity_dev < 1e-9);
  REQUIRE(rc.clouds.size() > 10);
  for (size_t k = 2; k < rc.clouds.size(); k += 9)
    for (int v = 0; v < rc.clouds[k].size(); v += 31)
      CHECK(std::abs(rc.clouds[k].points.row(v).norm() - 1.0) < 1e-3);

  // s-independence: Hausdorff distance between mid clouds.
  const auto& a = rc.clouds[rc.clouds.size() / 3];
  const auto& b = rc.clouds[2 * rc.clouds.size() / 3];
  CHECK(synthetic::hausdorff_distance(a.points, b.points) < 1e-3);

  const TimeRescaleResult rt = time_rescale(clifford_trace());
  CHECK(rt.max_identity_dev < 1e-9);
  const auto& c = rt.clouds[rt.clouds.size() / 2];
  for (int v = 0; v < c.size(); v += 41)
    for (int f = 0; f < 2; ++f)
      CHECK(std::abs(std::hypot(c.points(v, 2 * f), c.points(v, 2 * f + 1)) -
                     1.0) < 1e-3);
}

TEST_CASE("rescaled_flow_residual is small on exact shrinkers") {
  CHECK(rescaled_flow_residual(circle_trace()) < 1e-3);
  CHECK(rescaled_flow_residual(clifford_trace()) < 1e-3);
  CHECK_THROWS_AS(rescaled_flow_residual(graph_trace()), MissingPrereqError);
}

TEST_CASE("self_shrinker_residual: shrinkers vanish, offset planes do not") {
  const TimeRescaleResult rc = time_rescale(circle_trace());
  CHECK(self_shrinker_residual(rc.clouds[rc.clouds.size() / 2]) < 1e-3);
  const TimeRescaleResult rt = time_rescale(clifford_trace());
  CHECK(self_shrinker_residual(rt.clouds[rt.clouds.size() / 2]) < 1e-3);

  // Plane at distance d from the origin: the weighted norm is
  // d e^{-d^2/4} (2 pi)^{n/2 * 1/2} by the Gaussian plane mass.
  const double d = 0.3;
  VectorXd center(4);
  center << 0, d, 0, 0;
  const RescaledCloud plane =
      synthetic::plane_cloud(real_plane_basis(), center, kTwoPi, 64, 0.0);
  const double want = d * std::exp(-d * d / 4.0) * std::sqrt(kTwoPi);
  CHECK(self_shrinker_residual(plane) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("rescaled_theta_identity on the shrinkers") {
  CHECK(rescaled_theta_identity(circle_trace()) < 1e-2);
  CHECK(rescaled_theta_identity(clifford_trace()) < 1e-2);
  CHECK_THROWS_AS(rescaled_theta_identity(graph_trace()), MissingPrereqError);
}

TEST_CASE("rescaled_psi_monotonicity: static planes are fixed points") {
  const VectorXd origin = VectorXd::Zero(4);
  KernelSpec cutoff;
  cutoff.center = origin;
  cutoff.t0 = 1.0;

  const Immersion plane =
      synthetic::plane_immersion(real_plane_basis(), origin, kTwoPi, 32);
  const FlowTrace st =
      synthetic::static_trace(plane, {0.0, 0.3, 0.6}, 1.0, origin);
  const TimeRescaleResult tr = time_rescale(st);
  const RescaledPsiReport rep = rescaled_psi_monotonicity(tr.clouds, cutoff);
  CHECK(rep.refusals == 0);
  for (const auto& row : rep.rows) {
    CHECK(row.psi == doctest::Approx(kTwoPi).epsilon(1e-9));
    CHECK(std::abs(row.diss_shrinker) < 1e-12);
  }

  // Tilted static plane: Psi = (1/cos theta0) * Gaussian mass, constant.
  const double g1 = 0.25, g2 = 0.30;
  const Immersion tilted = synthetic::plane_immersion(
      synthetic::lagrangian_product_plane(g1, g2), origin, kTwoPi, 32);
  const FlowTrace ts =
      synthetic::static_trace(tilted, {0.0, 0.3, 0.6}, 1.0, origin);
  const RescaledPsiReport rept =
      rescaled_psi_monotonicity(time_rescale(ts).clouds, cutoff);
  for (const auto& row : rept.rows)
    CHECK(row.psi ==
          doctest::Approx(kTwoPi / std::cos(g1 + g2)).epsilon(1e-9));
}

TEST_CASE("rescaled_psi_monotonicity: graph flow with an artificial T") {
  KernelSpec cutoff;
  cutoff.center = VectorXd::Zero(4);
  cutoff.t0 = 1.0;
  const TimeRescaleResult tr =
      time_rescale(graph_trace(), 1.0, VectorXd::Zero(4));
  const RescaledPsiReport rep = rescaled_psi_monotonicity(tr.clouds, cutoff);
  CHECK(rep.refusals == 0);
  CHECK(rep.rows.size() > 20);
  CHECK(rep.monotone_within(1e-4));
  for (const auto& row : rep.rows) {
    CHECK(row.diss_shrinker >= 0.0);
    CHECK(row.diss_mean_curv >= 0.0);
    CHECK(row.diss_grad >= 0.0);
  }
}

TEST_CASE("integral_decay_report: plane zero, circle scale-invariant") {
  const VectorXd origin = VectorXd::Zero(4);
  const Immersion plane =
      synthetic::plane_immersion(real_plane_basis(), origin, 16.0, 96);
  std::vector<double> times;
  for (int i = 0; i <= 12; ++i) times.push_back(1.0 - 0.5 * std::pow(2.0, -i));
  const FlowTrace st = synthetic::static_trace(plane, times, 1.0, origin);
  const DecayReport prep = integral_decay_report(st, {1, 2, 4}, 1.0, -0.4, -0.1);
  for (const auto& row : prep.rows) {
    CHECK(row.window_covered);
    CHECK(row.grad_cos_sq == 0.0);
    CHECK(row.mean_curv_sq == 0.0);
    CHECK(row.position_perp_sq < 1e-20);
  }

  // Circle: |H_lambda|^2 integrals are lambda-independent (self-similar,
  // not almost calibrated) - the non-decay the hypothesis excludes.
  const DecayReport crep =
      integral_decay_report(circle_trace(), {1, 2, 4}, 1.0, -0.2, -0.05);
  for (double r : crep.h_ratios()) CHECK(r == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("integral_decay_report: synthetic normal perturbation decays ~ 1/lambda^2") {
  // Static plane with a fixed normal ripple: |H| ~ eps near the origin, so
  // the window integrals scale like lambda^{-2}.
  const double eps = 0.02;
  const int N = 192;
  Immersion im;
  im.ambient.n = 2;
  im.shape = {N, N};
  im.extent = {16.0, 16.0};
  im.positions.resize(N * N, 4);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double u = 16.0 * i / N - 8.0, v = 16.0 * j / N - 8.0;
      // cos ripple: the curvature does not vanish at the blow-up center.
      im.positions.row(i * N + j) << u, eps * std::cos(u), v, 0.0;
    }
  im.periodic_shifts = MatrixXd::Zero(2, 4);
  im.periodic_shifts(0, 0) = 16.0;
  im.periodic_shifts(1, 2) = 16.0;

  std::vector<double> times;
  for (int i = 0; i <= 12; ++i) times.push_back(1.0 - 0.5 * std::pow(2.0, -i));
  const FlowTrace st =
      synthetic::static_trace(im, times, 1.0, VectorXd::Zero(4));
  const DecayReport rep = integral_decay_report(st, {1, 2, 4}, 1.0, -0.4, -0.1);
  for (double r : rep.h_ratios()) {
    CHECK(r > 0.15);
    CHECK(r < 0.40);
  }
}

TEST_CASE("density_ratio: planes give exactly their multiplicity") {
  const VectorXd origin = VectorXd::Zero(4);
  const RescaledCloud one = synthetic::plane_cloud(
      synthetic::complex_plane_z1(), origin, 8.0, 400, 0.0, false);
  const std::vector<double> rhos = {0.3, 0.6, 1.0, 1.5};
  const auto r1 = density_ratio(one, origin, rhos);
  for (double r : r1) CHECK(r == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(nondecreasing_within(r1, 1e-3));

  const RescaledCloud two = concat_clouds(
      one, synthetic::plane_cloud(synthetic::complex_plane_z2(), origin, 8.0,
                                  400, 0.0, false));
  for (double r : density_ratio(two, origin, rhos))
    CHECK(r == doctest::Approx(2.0).epsilon(2e-3));

  CHECK_THROWS_AS(density_ratio(one, origin, {0.5, 0.4}), ConfigError);
}

TEST_CASE("density_ratio on the unit circle follows arc over chord") {
  const TimeRescaleResult rc = time_rescale(circle_trace());
  const RescaledCloud& c = rc.clouds[rc.clouds.size() / 2];
  VectorXd xi = c.points.row(0);
  const std::vector<double> rhos = {0.25, 0.5, 1.0};
  const auto ratios = density_ratio(c, xi, rhos);
  for (size_t i = 0; i < rhos.size(); ++i) {
    const double want = 2.0 * std::asin(rhos[i] / 2.0) / rhos[i];
    CHECK(ratios[i] == doctest::Approx(want).epsilon(0.02));
  }
  CHECK(nondecreasing_within(ratios, 1e-3));
}

TEST_CASE("max_dyadic_exponent caps by coverage and resolution") {
  const int K = max_dyadic_exponent(clifford_trace(), 1.0, 0.3);
  CHECK(K >= 2);
  const int K2 = max_dyadic_exponent(clifford_trace(), 1.0, 0.05);
  CHECK(K2 == 0);
}

TEST_CASE("intrinsic_ball_report: flat plane ratio approaches pi") {
  const VectorXd origin = VectorXd::Zero(4);
  MatrixXd B = MatrixXd::Zero(2, 4);
  B(0, 0) = 1;
  B(1, 2) = 1;
  const Immersion plane = synthetic::plane_immersion(B, origin, 8.0, 128);
  GeometryCache g;
  compute_geometry(plane, DiffScheme::Order4, g);
  const auto rows = intrinsic_ball_report(plane, g, 0, {0.5, 1.0, 2.0});
  for (const auto& row : rows) {
    // Grid-graph distances overestimate geodesics by up to the diagonal
    // anisotropy (~8%), shrinking the measured ball.
    CHECK(row.area_ratio > 0.75 * kPi);
    CHECK(row.area_ratio < 1.05 * kPi);
  }

  const Immersion cliff = build_scenario(clifford_spec(1.0, 48));
  GeometryCache cg;
  compute_geometry(cliff, DiffScheme::Order4, cg);
  const auto crows = intrinsic_ball_report(cliff, cg, 0, {0.3});
  CHECK(crows[0].area_ratio > 0.7 * kPi);
  CHECK(crows[0].area_ratio < 1.1 * kPi);
}
