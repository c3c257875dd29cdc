#pragma once

#include <cstdint>

#include "blowup.hpp"

namespace lagflow {

struct FittedPlane {
  MatrixXd basis;           // n x 2n, orthonormal rows, plane through origin
  int multiplicity = 1;     // rounded density ratio of the cluster
  double mean_theta = 0.0;  // weighted mean of carried angles
  double mean_cos_theta = 0.0;
  double fit_residual = 0.0;  // weighted RMS point-to-plane distance
  double weight_fraction = 0.0;
  double density_ratio_raw = 0.0;
};

struct PlaneCluster {
  std::vector<FittedPlane> planes;
  double unassigned_fraction = 0.0;
  bool plane_like = true;  // false when the unassigned bound is exceeded
  std::string note;
};

struct FitParams {
  double grassmann_threshold = 0.2;  // Frobenius distance of projectors
  int max_planes = 8;
  int refine_iters = 8;
  double unassigned_bound = 0.1;
  int ransac_trials = 64;
  double ball_radius = 1.0;          // R; multiplicity read at rho = R/2
  double min_cluster_weight = 0.01;  // fraction of total weight
  std::uint64_t seed = 12345;
};

// Clusters points by tangent-plane Grassmannian distance (greedy seeding,
// k-means style refinement, RANSAC fallback), then fits each cluster a plane
// through the origin by weighted least squares.
PlaneCluster fit_planes(const RescaledCloud& cloud, const FitParams& params = {});

struct AngleConstancyReport {
  double oscillation = 0.0;    // max spread of ball-averaged cos(theta)
  double grad_integral = 0.0;  // int_{B_R} |grad cos(theta)| dmu
  int centers_used = 0;
};

AngleConstancyReport angle_constancy(const RescaledCloud& cloud,
                                     double r = 0.25, double R = 1.0);

struct WitnessReport {
  bool found = false;
  std::string reason;
  double theta0_weight = 0.0;  // common calibration weight cos(theta_0)
  Eigen::Matrix4d J_star = Eigen::Matrix4d::Zero();   // ambient coordinates
  Eigen::Matrix4d J_prime = Eigen::Matrix4d::Zero();  // starred coordinates
  double max_invariance_residual = 0.0;  // max_P |J' P - P J' P|_F
};

// Builds the skewed complex structure J* from the common angle weight and
// checks that every
// fitted plane, mapped to the rescaled coordinates (x1, y1/t0, x2/t0, y2),
// is invariant under J' (the structure whose complex lines are the planes
// unit-calibrated by Re(dz*_1 ^ dz*_2)). n = 2 only.
WitnessReport complex_structure_witness(const PlaneCluster& cluster,
                                        double angle_tol = 1e-6);

struct FlatnessReport {
  double rms_A = 0.0;          // weighted L2 of |A| over B_R, normalized
  double mean_abs_det_h = 0.0; // weighted mean of sum_a |det hhat^a| over B_R
};

FlatnessReport flatness_check(const RescaledCloud& cloud, double R = 1.0);

// Largest principal angle between two planes given by orthonormal row bases.
double max_principal_angle(const MatrixXd& A, const MatrixXd& B);

}  // namespace lagflow
