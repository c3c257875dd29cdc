#pragma once

#include <cstdint>

#include "blowup.hpp"

namespace lagflow {
namespace synthetic {

// Flat plane patch through `center` spanned by the orthonormal rows of
// `basis` (n x 2n), sampled on an N^n grid over [-L/2, L/2)^n; periodic
// shifts are the in-plane period vectors L * basis_row, so kernel integrals
// see the full infinite plane.
Immersion plane_immersion(const MatrixXd& basis, const VectorXd& center,
                          double L, int N);

// Direct plane cloud with prescribed carried angle (no differentiation
// involved; A, H, grad v are identically zero). `periodic` controls whether
// the shift lattice is attached.
RescaledCloud plane_cloud(const MatrixXd& basis, const VectorXd& center,
                          double L, int N, double theta_value,
                          bool periodic = true);

// Orthonormal basis rows of standard objects in C^2 (coordinates
// x1, y1, x2, y2).
MatrixXd complex_plane_z1();            // span{d/dx1, d/dy1}
MatrixXd complex_plane_z2();            // span{d/dx2, d/dy2}
MatrixXd lagrangian_product_plane(double gamma1, double gamma2);

// The two Lagrangian planes with common calibration weight t0 = cos(theta)
// that are complex lines of the witness structure J' (reversal of the
// paper's construction): solutions c = e^{i phi} with
// sin^2(phi) = (1+t0^2)^2 / ((t0^2-1)^2 + 4). Bases are oriented so the
// carried angle has cos(theta) = +t0.
std::pair<MatrixXd, MatrixXd> witness_plane_pair(double theta0_weight);

// Lagrangian angle of the plane spanned by the rows of `basis`
// (arg of the complex frame determinant).
double plane_angle(const MatrixXd& basis);

// Random U(n) element embedded as a real 2n x 2n matrix (commutes with J,
// preserves omega) and a random SO(D) rotation.
MatrixXd random_unitary(int n, std::uint64_t seed);
MatrixXd random_rotation(int dim, std::uint64_t seed);

// Applies a rigid rotation to every cloud quantity.
RescaledCloud rotate_cloud(const RescaledCloud& cloud, const MatrixXd& U);

// Trace whose snapshots all hold the given immersion (a static surface),
// with a synthetic singularity report at time T_art centered at `center`.
// Times must be strictly increasing and below T_art.
FlowTrace static_trace(const Immersion& im, const std::vector<double>& times,
                       double T_art, const VectorXd& center,
                       DiffScheme scheme = DiffScheme::Order4);

// Symmetric Hausdorff distance between two point sets (rows).
double hausdorff_distance(const MatrixXd& A, const MatrixXd& B);

}  // namespace synthetic
}  // namespace lagflow
