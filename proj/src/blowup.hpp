#pragma once

#include "flow.hpp"
#include "kernels.hpp"

namespace lagflow {

// Weighted point cloud extracted from a rescaled flow snapshot. Carried
// quantities obey the parabolic scaling laws: for F |-> sigma (F - X0),
//   weights ~ sigma^n dmu,  H ~ sigma^{-1} H,  |A|^2 ~ sigma^{-2} |A|^2,
//   hhat ~ sigma^{-1} hhat, |grad cos theta| ~ sigma^{-1}, theta unchanged.
struct RescaledCloud {
  enum class ScaleType { Lambda, TimeDependent, Synthetic };
  ScaleType scale_type = ScaleType::Synthetic;
  double scale = 1.0;    // lambda, or 1/sqrt(2(T-t))
  double s = 0.0;        // -log(T-t)/2 for time-dependent clouds
  double t_source = 0.0;

  int n = 1;
  MatrixXd points;       // V x 2n
  VectorXd weights;      // per-point area elements (cell measure included)
  MatrixXd frame;        // V x (n*2n) orthonormal tangent bases
  VectorXd theta;
  VectorXd cos_theta;
  VectorXd grad_v_norm;  // |grad cos theta|, rescaled
  VectorXd A_sq;         // |A|^2, rescaled
  MatrixXd second_fund;  // hhat^alpha_{ab}, rescaled
  MatrixXd mean_curv;    // H, rescaled (H_lambda resp. H-tilde)
  MatrixXd shifts;       // periodic shifts, rescaled (n x 2n; zero rows ok)
  VectorXd cell_size;    // per-point linear cell extent, for ball antialiasing

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return 2 * n; }
  bool has_shifts() const {
    return shifts.size() > 0 && shifts.cwiseAbs().maxCoeff() > 0;
  }
  void perp_component(int v, const double* vec, double* out) const;
  void validate() const;
};

RescaledCloud make_cloud(const Immersion& im, const GeometryCache& geo,
                         const VectorXd& center, double sigma,
                         RescaledCloud::ScaleType type, double t_source);

// Concatenation (disjoint union of supports).
RescaledCloud concat_clouds(const RescaledCloud& a, const RescaledCloud& b);

// lambda (F(x, T + lambda^{-2} t) - X0) at the snapshot nearest the
// requested time; t must be negative and covered by the trace.
RescaledCloud lambda_rescale(const FlowTrace& trace, double lambda, double t);

struct TimeRescaleResult {
  std::vector<RescaledCloud> clouds;  // ordered by s
  double max_identity_dev = 0.0;      // worst relative deviation of the
                                      // |A~|^2 = 2(T-t)|A|^2 identity
};

// F~ = (F - X0)/sqrt(2(T-t)), s = -log(T-t)/2, over the retained snapshots.
// T and the center default to the singularity report (refined center) and
// may be overridden (e.g. an artificial T for smooth flows).
TimeRescaleResult time_rescale(const FlowTrace& trace,
                               std::optional<double> T_override = {},
                               std::optional<VectorXd> center_override = {});

// Normalized residual of dF~/ds = H~ + F~ over consecutive snapshot pairs.
double rescaled_flow_residual(const FlowTrace& trace,
                              std::optional<double> T_override = {},
                              std::optional<VectorXd> center_override = {});

// Gaussian-weighted L^2 norm of H~ + F~perp, weight exp(-|X|^2/2)
// (unnormalized, lattice-summed on periodic clouds).
double self_shrinker_residual(const RescaledCloud& cloud);

// Normalized residual of (d/ds - Lap~) v~ = |H~|^2 v~ over snapshot pairs.
double rescaled_theta_identity(const FlowTrace& trace,
                               DiffScheme scheme = DiffScheme::Order2,
                               std::optional<double> T_override = {},
                               std::optional<VectorXd> center_override = {});

struct RescaledPsiRow {
  double s = 0, psi = 0;
  double dpsi_ds = 0;                    // forward difference to the next s
  double diss_shrinker = 0;              // int (1/v) phi rho |H~ + F~perp|^2
  double diss_mean_curv = 0;             // int (1/v) phi rho |H~|^2 / 2
  double diss_grad = 0;                  // int (2/v^3) |grad v|^2 phi rho
  double margin = 0;                     // dpsi_ds + sum of dissipations
  bool refused = false;
  std::string reason;
};

struct RescaledPsiReport {
  std::vector<RescaledPsiRow> rows;
  int refusals = 0;
  bool monotone_within(double tol) const;
  double max_dpsi_ds() const;
};

RescaledPsiReport rescaled_psi_monotonicity(
    const std::vector<RescaledCloud>& clouds, const KernelSpec& cutoff);

struct DecayRow {
  double lambda = 0;
  double grad_cos_sq = 0;  // int int |grad cos theta_l|^2
  double mean_curv_sq = 0; // int int |H_l|^2
  double position_perp_sq = 0;  // int int |F_l^perp|^2
  bool window_covered = true;
  int snapshots_used = 0;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  // Ratio of successive mean_curv_sq entries (decay indicator).
  std::vector<double> h_ratios() const;
};

// Space-time decay integrals over [s1, s2] x (Sigma^lambda cap B_R(0))
// per lambda: grad cos(theta), mean curvature and normal position in L^2.
DecayReport integral_decay_report(const FlowTrace& trace,
                                  const std::vector<double>& lambdas, double R,
                                  double s1, double s2);

// rho^{-n} (weighted measure of cloud within B_rho(xi)) / omega_n.
std::vector<double> density_ratio(const RescaledCloud& cloud,
                                  const VectorXd& xi,
                                  const std::vector<double>& rhos);

// True when the sequence is nondecreasing within tol.
bool nondecreasing_within(const std::vector<double>& seq, double tol);

// Gaussian density of a cloud: sum w (4 pi s)^{-n/2} exp(-|x-X0|^2/(4s)),
// lattice-summed over periodic shifts.
double cloud_gaussian_density(const RescaledCloud& cloud, const VectorXd& X0,
                              double s);

// Weighted measure of cloud within B_rho(xi) (antialiased boundary).
double cloud_ball_measure(const RescaledCloud& cloud, const VectorXd& xi,
                          double rho);

// Largest dyadic exponent K such that the rescaled grid spacing stays below
// `target_spacing` inside B_R for lambda = 2^K.
int max_dyadic_exponent(const FlowTrace& trace, double R,
                        double target_spacing = 0.1);

struct IsoperimetricRow {
  double rho = 0;
  double area_ratio = 0;  // area(intrinsic ball of radius rho) / rho^n
};

// Area of intrinsic balls against rho^n, a monitored statistic (the
// isoperimetric lower bound has an unknown constant, so nothing is asserted).
// Intrinsic distances are geodesic distances on the grid graph
// (axis + diagonal edges, seam-aware).
std::vector<IsoperimetricRow> intrinsic_ball_report(
    const Immersion& im, const GeometryCache& geo, int center_vertex,
    const std::vector<double>& rhos);

}  // namespace lagflow
