#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "planes.hpp"
#include "synthetic.hpp"

using namespace lagflow;

namespace {

RescaledCloud two_plane_cloud(const MatrixXd& A, const MatrixXd& B,
                              double thetaA, double thetaB, int N = 71,
                              double L = 2.0) {
  const VectorXd origin = VectorXd::Zero(4);
  return concat_clouds(synthetic::plane_cloud(A, origin, L, N, thetaA, false),
                       synthetic::plane_cloud(B, origin, L, N, thetaB, false));
}

const RescaledCloud& clifford_cloud() {
  static const RescaledCloud cloud = [] {
    FlowControls controls;
    const FlowTrace trace = run(build_scenario(clifford_spec(1.0, 24)),
                                controls, clifford_spec(1.0, 24));
    TimeRescaleResult tr = time_rescale(trace);
    return tr.clouds[tr.clouds.size() / 2];
  }();
  return cloud;
}

}  // namespace

TEST_CASE("fit_planes recovers a transverse pair of complex planes") {
  const RescaledCloud cloud = two_plane_cloud(
      synthetic::complex_plane_z1(), synthetic::complex_plane_z2(), 0.0, 0.0);
  CHECK(cloud.size() == 2 * 71 * 71);
  const PlaneCluster fit = fit_planes(cloud);
  REQUIRE(fit.planes.size() == 2);
  CHECK(fit.plane_like);
  CHECK(fit.unassigned_fraction == 0.0);
  for (const auto& p : fit.planes) {
    const double a1 = max_principal_angle(p.basis, synthetic::complex_plane_z1());
    const double a2 = max_principal_angle(p.basis, synthetic::complex_plane_z2());
    CHECK(std::min(a1, a2) < 1e-6);
    CHECK(p.multiplicity == 1);
    CHECK(p.fit_residual < 1e-10);
  }
}

TEST_CASE("fit_planes: duplicated plane reports multiplicity 2") {
  const RescaledCloud cloud = two_plane_cloud(
      synthetic::complex_plane_z1(), synthetic::complex_plane_z1(), 0.0, 0.0);
  const PlaneCluster fit = fit_planes(cloud);
  REQUIRE(fit.planes.size() == 1);
  CHECK(fit.planes[0].multiplicity == 2);
  CHECK(fit.planes[0].density_ratio_raw == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("fit_planes flags the curved clifford cloud as not plane-like") {
  const PlaneCluster fit = fit_planes(clifford_cloud());
  const bool curved_detected =
      !fit.plane_like ||
      std::any_of(fit.planes.begin(), fit.planes.end(),
                  [](const FittedPlane& p) { return p.fit_residual > 0.05; });
  CHECK(curved_detected);
}

TEST_CASE("fit_planes is equivariant under ambient rotations") {
  const RescaledCloud cloud = two_plane_cloud(
      synthetic::complex_plane_z1(), synthetic::complex_plane_z2(), 0.0, 0.0);
  const MatrixXd U = synthetic::random_rotation(4, 2024);
  const RescaledCloud rotated = synthetic::rotate_cloud(cloud, U);
  const PlaneCluster a = fit_planes(cloud);
  const PlaneCluster b = fit_planes(rotated);
  REQUIRE(a.planes.size() == 2);
  REQUIRE(b.planes.size() == 2);
  for (const auto& pa : a.planes) {
    MatrixXd want = pa.basis * U.transpose();
    double best = 1e9;
    for (const auto& pb : b.planes)
      best = std::min(best, max_principal_angle(want, pb.basis));
    CHECK(best < 1e-6);
  }
}

TEST_CASE("angle_constancy: zero on constant-angle unions, large on clifford") {
  const RescaledCloud cloud = two_plane_cloud(
      synthetic::complex_plane_z1(), synthetic::complex_plane_z2(), 0.3, 0.3);
  const AngleConstancyReport rep = angle_constancy(cloud, 0.3, 1.5);
  CHECK(rep.centers_used > 3);
  CHECK(rep.oscillation < 1e-12);
  CHECK(rep.grad_integral == 0.0);

  const AngleConstancyReport crep = angle_constancy(clifford_cloud(), 0.4, 3.0);
  CHECK(crep.oscillation > 0.5);
  CHECK(crep.grad_integral > 0.5);
}

TEST_CASE("witness_plane_pair: Lagrangian, common angle, J'-invariant") {
  const double t0 = 0.8;
  const auto [A, B] = synthetic::witness_plane_pair(t0);
  for (const MatrixXd& P : {A, B}) {
    CHECK(std::abs(symplectic_form(P.row(0).data(), P.row(1).data(), 2)) <
          1e-12);
    CHECK(std::cos(synthetic::plane_angle(P)) == doctest::Approx(t0).epsilon(1e-12));
  }
  CHECK(max_principal_angle(A, B) > 0.1);  // genuinely transverse
}

TEST_CASE("complex_structure_witness finds J* and J' for the synthetic pair") {
  const double t0 = 0.8;
  const auto [A, B] = synthetic::witness_plane_pair(t0);
  const RescaledCloud cloud = two_plane_cloud(
      A, B, synthetic::plane_angle(A), synthetic::plane_angle(B));
  const PlaneCluster fit = fit_planes(cloud);
  REQUIRE(fit.planes.size() == 2);
  const WitnessReport rep = complex_structure_witness(fit);
  CHECK(rep.found);
  CHECK(rep.theta0_weight == doctest::Approx(t0).epsilon(1e-9));
  CHECK(rep.max_invariance_residual < 1e-6);
  // J* squares to minus the identity.
  CHECK((rep.J_star * rep.J_star + Eigen::Matrix4d::Identity()).norm() < 1e-12);
}

TEST_CASE("complex_structure_witness: standard complex planes, weight one") {
  const RescaledCloud cloud = two_plane_cloud(
      synthetic::complex_plane_z1(), synthetic::complex_plane_z2(), 0.0, 0.0);
  PlaneCluster fit = fit_planes(cloud);
  // Carried angle zero means calibration weight cos(theta) = 1.
  const WitnessReport rep = complex_structure_witness(fit);
  CHECK(rep.found);
  CHECK(rep.theta0_weight == doctest::Approx(1.0));
  CHECK(rep.max_invariance_residual < 1e-10);
}

TEST_CASE("complex_structure_witness refuses on mismatched angles") {
  const RescaledCloud cloud =
      two_plane_cloud(synthetic::complex_plane_z1(),
                      synthetic::complex_plane_z2(), std::acos(0.8),
                      std::acos(0.5));
  const PlaneCluster fit = fit_planes(cloud);
  const WitnessReport rep = complex_structure_witness(fit);
  CHECK(!rep.found);
  CHECK(rep.reason.find("disagree") != std::string::npos);
}

TEST_CASE("flatness_check: plane unions flat, clifford |A~|^2 = 2") {
  const RescaledCloud planes = two_plane_cloud(
      synthetic::complex_plane_z1(), synthetic::complex_plane_z2(), 0.0, 0.0);
  const FlatnessReport prep = flatness_check(planes, 1.0);
  CHECK(prep.rms_A == 0.0);
  CHECK(prep.mean_abs_det_h == 0.0);

  const FlatnessReport crep = flatness_check(clifford_cloud(), 2.0);
  CHECK(crep.rms_A == doctest::Approx(std::sqrt(2.0)).epsilon(1e-2));

  // Perturbed plane: |A| = O(eps).
  const double eps = 0.05;
  const int N = 64;
  Immersion im;
  im.ambient.n = 2;
  im.shape = {N, N};
  im.extent = {kTwoPi, kTwoPi};
  im.positions.resize(N * N, 4);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const double u = kTwoPi * i / N - kPi, v = kTwoPi * j / N - kPi;
      im.positions.row(i * N + j) << u, eps * std::sin(u), v, 0.0;
    }
  im.periodic_shifts = MatrixXd::Zero(2, 4);
  im.periodic_shifts(0, 0) = kTwoPi;
  im.periodic_shifts(1, 2) = kTwoPi;
  GeometryCache g;
  compute_geometry(im, DiffScheme::Order4, g);
  const RescaledCloud pc = make_cloud(im, g, VectorXd::Zero(4), 1.0,
                                      RescaledCloud::ScaleType::Synthetic, 0.0);
  const FlatnessReport rep = flatness_check(pc, 2.0);
  CHECK(rep.rms_A > 0.2 * eps);
  CHECK(rep.rms_A < 2.0 * eps);
}
