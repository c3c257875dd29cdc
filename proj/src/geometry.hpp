#pragma once

#include <complex>

#include "grid.hpp"
#include "types.hpp"

namespace lagflow {

enum class GeomDetail { MeanCurvatureOnly, Full };

// Per-vertex first/second order geometry of a discrete Lagrangian immersion.
// Second fundamental form components hhat^alpha_{ab} are stored in the
// orthonormal tangent frame (both indices), normals are nu_alpha = J e_alpha.
// theta is the unwrapped Lagrangian angle: arg of the complex frame
// determinant, continued along grid rows then columns from vertex (0,...,0);
// across the periodic seam it jumps by 2*pi*winding (the angle is
// multi-valued, cos(theta) is not).
struct GeometryCache {
  Grid grid;
  DiffScheme scheme = DiffScheme::Order4;
  GeomDetail detail = GeomDetail::Full;

  MatrixXd tangent;         // V x (n*2n), block j holds dF/du_j
  MatrixXd metric;          // V x (n*n)
  MatrixXd metric_inv;      // V x (n*n)
  VectorXd sqrt_det_g;      // V
  MatrixXd frame;           // V x (n*2n), orthonormal e_alpha
  MatrixXd normal;          // V x (n*2n), nu_alpha = J e_alpha
  MatrixXd second_fund;     // V x (n*n*n), hhat^alpha_{ab}
  MatrixXd mean_curv;       // V x 2n
  VectorXd norm_A_sq;       // V
  VectorXd theta;           // V, unwrapped branch
  VectorXd cos_theta;       // V
  MatrixXd grad_cos_theta;  // V x 2n, ambient tangential gradient of cos
  VectorXd grad_cos_sq;     // V, |grad cos(theta)|^2 in the induced metric

  long winding[2] = {0, 0};
  bool unwrap_suspect = false;
  double cell_volume = 0.0;  // product of parametric spacings
  double volume = 0.0;
  double max_A_sq = 0.0;
  double min_cos_theta = 0.0;
  double max_H = 0.0;
  double min_sqrt_metric_eig = 0.0;
  double theta_root = 0.0;

  int n() const { return grid.n; }
  int dim() const { return 2 * grid.n; }
  int V() const { return grid.V; }

  // Tangential/normal split of an ambient vector at vertex v.
  void perp_component(int v, const double* vec, double* out) const;
};

// Populates `geo` from the immersion. `prev_theta`, when given, pins the
// 2*pi*k branch constant by continuity at the root vertex against the
// previous snapshot.
void compute_geometry(const Immersion& im, DiffScheme scheme,
                      GeometryCache& geo,
                      GeomDetail detail = GeomDetail::Full,
                      const VectorXd* prev_theta = nullptr);

// Max over vertices and index pairs of |omega(dF/du_i, dF/du_j)|; zero iff
// discretely Lagrangian. Throws NumericalError on a degenerate frame.
double lagrangian_residual(const Immersion& im,
                           DiffScheme scheme = DiffScheme::Order4);

// Relative L^2(mu) norm of H - J grad(theta).
double angle_gradient_residual(const GeometryCache& geo);

// Laplace-Beltrami of a scalar field in the induced metric,
// div(sqrt(g) g^{ij} d_j f)/sqrt(g) in expanded form. Set `angle_field` for
// branch-tracked angles (seam-safe differences).
void laplace_beltrami(const GeometryCache& geo, const VectorXd& f,
                      bool angle_field, DiffScheme scheme, VectorXd& out);

// Parameter-space derivatives D_j f (V x n).
void scalar_derivatives(const GeometryCache& geo, const VectorXd& f,
                        bool angle_field, DiffScheme scheme, MatrixXd& out);

// |grad f|^2 = g^{ij} D_i f D_j f per vertex.
void intrinsic_grad_sq(const GeometryCache& geo, const MatrixXd& df,
                       VectorXd& out);

// sum_v f_v sqrt(g)_v * cell (periodic trapezoidal quadrature).
double surface_integral(const GeometryCache& geo, const VectorXd& f);

// L^2(mu) norm.
double l2_norm(const GeometryCache& geo, const VectorXd& f);

// Complex determinant of the tangent frame in complex coordinates at vertex
// v; equals e^{i theta} sqrt(det g) for Lagrangian immersions.
std::complex<double> complex_frame_det(const GeometryCache& geo, int v);

}  // namespace lagflow
