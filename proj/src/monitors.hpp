#pragma once

#include "flow.hpp"
#include "kernels.hpp"

namespace lagflow {

// Huisken functional Phi = int phi rho dmu and the Re(Omega)-weighted
// Psi = int (1/cos theta) phi rho dmu. On immersions with periodic shifts
// (graphs, plane patches) the kernel is summed over the shift lattice, i.e.
// the integral runs over the full periodic submanifold in the cover.
// weighted_psi refuses (HypothesisError) when cos(theta) <= 0 anywhere on
// the cutoff support: the 1/v weight is the almost-calibrated device and is
// never clamped.
double weighted_psi(const Immersion& im, const GeometryCache& geo, double t,
                    const KernelSpec& spec);
double gaussian_density(const Immersion& im, const GeometryCache& geo,
                        double t, const KernelSpec& spec);

// Dissipation of the weighted monotonicity inequality at one state
// (flat ambient, so the curved-metric correction constants vanish):
//   D(t) = int (1/v) phi rho ( 2|grad v|^2/v^2
//                              + |H + (F - X0)^perp / (2(t0 - t))|^2
//                              + |H|^2 / 2 ) dmu.
double psi_dissipation(const Immersion& im, const GeometryCache& geo, double t,
                       const KernelSpec& spec);

struct PsiStepRecord {
  double t = 0, dt = 0;
  double psi = 0, psi_next = 0;
  double dpsi_dt = 0, dissipation = 0;
  double margin = 0;  // dpsi_dt + dissipation; <= tol_disc when monotone
  bool refused = false;
  std::string reason;
};

struct PsiReport {
  std::vector<PsiStepRecord> rows;
  int refusals = 0;

  bool monotone_within(double tol) const;
  double fraction_dissipation_ok(double tol) const;
  double max_margin() const;
  double max_dpsi_dt() const;
};

// Evaluates Psi and the dissipation over every recorded snapshot pair.
// Hypothesis failures are recorded per snapshot, not fatal.
PsiReport psi_monotonicity_report(const FlowTrace& trace,
                                  const KernelSpec& spec);

struct DensityBoundRow {
  double lambda = 0;
  double sup_ratio = 0;  // sup_t area(Sigma_t^lambda cap B_R) / (omega_n R^n)
  int snapshots_used = 0;
};

struct DensityBoundReport {
  std::vector<DensityBoundRow> rows;
  double max_over_min = 0;
};

// Uniform bound on lambda-rescaled volume-density ratios
// across the lambda sequence.
DensityBoundReport volume_density_bound(const FlowTrace& trace, double R,
                                        const std::vector<double>& lambdas,
                                        int max_snapshots = 64);

// Residual of d/dt int phi dmu + int (phi |H|^2 + grad(phi).H) dmu over the
// recorded pairs (normalized, averaged). Null cutoff means phi == 1.
double first_variation_residual(const FlowTrace& trace,
                                const KernelSpec* cutoff = nullptr);

}  // namespace lagflow
