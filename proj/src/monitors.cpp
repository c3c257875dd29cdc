#include "monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lagflow {

namespace {

// Shared Psi/Phi/dissipation quadrature. Returns the integral of
//   weight(v) * phi * rho * extra(vertex, translate)
// over the immersion, lattice-summed over periodic translates.
template <typename Extra>
double kernel_integral(const Immersion& im, const GeometryCache& geo, double t,
                       const KernelSpec& spec, bool weighted, Extra&& extra,
                       bool* refused = nullptr, std::string* reason = nullptr) {
  spec.validate(im.dim());
  const double s = spec.t0 - t;
  if (!(s > 0)) throw ConfigError("kernel evaluation needs t < t0");
  const int n = im.n(), D = im.dim(), V = im.vertex_count();

  const auto translates = kernel_translates(im, spec.center, 4.0 * s);
  const double norm = std::pow(4.0 * kPi * s, -0.5 * n);

  // Almost-calibrated hypothesis on the cutoff support.
  if (weighted) {
    double minv = std::numeric_limits<double>::infinity();
    bool on_support = false;
    for (int v = 0; v < V; ++v) {
      bool support = false;
      for (const auto& tr : translates) {
        double d2 = 0.0;
        for (int c = 0; c < D; ++c) {
          const double x = im.positions(v, c) + tr[c] - spec.center[c];
          d2 += x * x;
        }
        if (!spec.has_cutoff() || d2 < 4.0 * spec.cutoff_radius *
                                           spec.cutoff_radius) {
          support = true;
          break;
        }
      }
      if (support) {
        on_support = true;
        minv = std::min(minv, geo.cos_theta[v]);
      }
    }
    if (on_support && !(minv > 0)) {
      const std::string msg =
          "cos(theta) <= 0 on the cutoff support (min = " +
          std::to_string(minv) + "); the 1/v weight is undefined";
      if (refused) {
        *refused = true;
        if (reason) *reason = msg;
        return 0.0;
      }
      throw HypothesisError(msg);
    }
  }

  double acc = 0.0;
  VectorXd rel(D);
  for (int v = 0; v < V; ++v) {
    const double w = weighted ? 1.0 / geo.cos_theta[v] : 1.0;
    double cell = geo.sqrt_det_g[v] * geo.cell_volume;
    for (const auto& tr : translates) {
      double d2 = 0.0;
      for (int c = 0; c < D; ++c) {
        rel[c] = im.positions(v, c) + tr[c] - spec.center[c];
        d2 += rel[c] * rel[c];
      }
      const double dist = std::sqrt(d2);
      const double phi = cutoff_value(spec, dist);
      if (phi == 0.0) continue;
      const double rho = norm * std::exp(-d2 / (4.0 * s));
      acc += w * phi * rho * extra(v, rel) * cell;
    }
  }
  if (refused) *refused = false;
  return acc;
}

struct Unit {
  double operator()(int, const VectorXd&) const { return 1.0; }
};

}  // namespace

double weighted_psi(const Immersion& im, const GeometryCache& geo, double t,
                    const KernelSpec& spec) {
  return kernel_integral(im, geo, t, spec, true, Unit{});
}

double gaussian_density(const Immersion& im, const GeometryCache& geo,
                        double t, const KernelSpec& spec) {
  return kernel_integral(im, geo, t, spec, false, Unit{});
}

double psi_dissipation(const Immersion& im, const GeometryCache& geo, double t,
                       const KernelSpec& spec) {
  const double s = spec.t0 - t;
  const int D = im.dim();
  return kernel_integral(
      im, geo, t, spec, true, [&](int v, const VectorXd& rel) {
        const double vv = geo.cos_theta[v];
        double perp[4];
        geo.perp_component(v, rel.data(), perp);
        double term = 0.0;
        for (int c = 0; c < D; ++c) {
          const double z = geo.mean_curv(v, c) + perp[c] / (2.0 * s);
          term += z * z;
        }
        const double h2 = geo.mean_curv.row(v).squaredNorm();
        return 2.0 * geo.grad_cos_sq[v] / (vv * vv) + term + 0.5 * h2;
      });
}

bool PsiReport::monotone_within(double tol) const {
  for (const auto& r : rows)
    if (!r.refused && r.dpsi_dt > tol) return false;
  return true;
}

double PsiReport::fraction_dissipation_ok(double tol) const {
  int ok = 0, total = 0;
  for (const auto& r : rows) {
    if (r.refused) continue;
    ++total;
    if (r.margin <= tol) ++ok;
  }
  return total > 0 ? static_cast<double>(ok) / total : 0.0;
}

double PsiReport::max_margin() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    if (!r.refused) m = std::max(m, r.margin);
  return m;
}

double PsiReport::max_dpsi_dt() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    if (!r.refused) m = std::max(m, r.dpsi_dt);
  return m;
}

PsiReport psi_monotonicity_report(const FlowTrace& trace,
                                  const KernelSpec& spec) {
  PsiReport report;
  for (const auto& snap : trace.snapshots) {
    PsiStepRecord row;
    row.t = snap.t;
    row.dt = snap.dt_next;
    try {
      Immersion im1 = trace.initial, im2 = trace.initial;
      im1.positions = snap.positions;
      im2.positions = snap.positions_next;
      GeometryCache g1, g2;
      compute_geometry(im1, trace.controls.scheme, g1);
      compute_geometry(im2, trace.controls.scheme, g2);
      bool refused = false;
      std::string reason;
      row.psi = kernel_integral(im1, g1, snap.t, spec, true, Unit{}, &refused,
                                &reason);
      if (!refused)
        row.psi_next = kernel_integral(im2, g2, snap.t + snap.dt_next, spec,
                                       true, Unit{}, &refused, &reason);
      if (refused) {
        row.refused = true;
        row.reason = reason;
      } else {
        row.dpsi_dt = (row.psi_next - row.psi) / snap.dt_next;
        row.dissipation = psi_dissipation(im1, g1, snap.t, spec);
        row.margin = row.dpsi_dt + row.dissipation;
      }
    } catch (const ConfigError& e) {
      row.refused = true;
      row.reason = e.what();
    }
    if (row.refused) ++report.refusals;
    report.rows.push_back(std::move(row));
  }
  return report;
}

DensityBoundReport volume_density_bound(const FlowTrace& trace, double R,
                                        const std::vector<double>& lambdas,
                                        int max_snapshots) {
  if (!trace.singularity)
    throw MissingPrereqError(
        "volume_density_bound: trace has no singularity_report");
  if (lambdas.empty()) throw ConfigError("lambda sequence is empty");
  const auto& sing = *trace.singularity;
  const int n = trace.n(), D = 2 * n;
  const double wn = unit_ball_volume(n);

  std::vector<int> picks;
  const int S = static_cast<int>(trace.snapshots.size());
  const int stride = std::max(1, S / max_snapshots);
  for (int i = 0; i < S; i += stride)
    if (trace.snapshots[i].t < sing.T) picks.push_back(i);
  if (picks.empty())
    throw MissingPrereqError("no rescalable snapshots before T");

  DensityBoundReport rep;
  rep.rows.resize(lambdas.size());
  for (size_t li = 0; li < lambdas.size(); ++li) {
    rep.rows[li].lambda = lambdas[li];
    rep.rows[li].sup_ratio = 0.0;
  }

  for (int idx : picks) {
    const GeometryCache geo = trace.snapshot_geometry(idx);
    const Immersion im = trace.snapshot_immersion(idx);
    for (size_t li = 0; li < lambdas.size(); ++li) {
      const double lam = lambdas[li];
      double area = 0.0;
      for (int v = 0; v < geo.V(); ++v) {
        double d2 = 0.0;
        for (int c = 0; c < D; ++c) {
          const double x = lam * (im.positions(v, c) - sing.X0_refined[c]);
          d2 += x * x;
        }
        const double dist = std::sqrt(d2);
        // Linear antialiasing of the ball boundary over one cell width.
        double ell = 0.0;
        for (int d = 0; d < n; ++d)
          ell = std::max(ell,
                         geo.tangent.row(v).segment(d * D, D).norm() *
                             geo.grid.h[d] * lam);
        const double frac =
            ell > 0 ? std::clamp(0.5 + (R - dist) / ell, 0.0, 1.0)
                    : (dist <= R ? 1.0 : 0.0);
        if (frac > 0)
          area += frac * geo.sqrt_det_g[v] * geo.cell_volume *
                  std::pow(lam, n);
      }
      const double ratio = area / (wn * std::pow(R, n));
      rep.rows[li].sup_ratio = std::max(rep.rows[li].sup_ratio, ratio);
      rep.rows[li].snapshots_used++;
    }
  }

  double mx = 0, mn = std::numeric_limits<double>::infinity();
  for (const auto& r : rep.rows) {
    mx = std::max(mx, r.sup_ratio);
    mn = std::min(mn, r.sup_ratio);
  }
  rep.max_over_min = mn > 0 ? mx / mn : std::numeric_limits<double>::infinity();
  return rep;
}

double first_variation_residual(const FlowTrace& trace,
                                const KernelSpec* cutoff) {
  if (trace.snapshots.empty())
    throw MissingPrereqError("trace has no snapshot pairs");
  const int D = 2 * trace.n();

  auto eval = [&](const Immersion& im, const GeometryCache& geo, double& q,
                  double& flux) {
    q = 0.0;
    flux = 0.0;
    std::vector<VectorXd> translates;
    if (cutoff)
      translates = kernel_translates(
          im, cutoff->center, 4.0 * cutoff->cutoff_radius * cutoff->cutoff_radius);
    else
      translates.push_back(VectorXd::Zero(D));
    for (int v = 0; v < geo.V(); ++v) {
      const double cell = geo.sqrt_det_g[v] * geo.cell_volume;
      const double h2 = geo.mean_curv.row(v).squaredNorm();
      if (!cutoff) {
        q += cell;
        flux += h2 * cell;
        continue;
      }
      for (const auto& tr : translates) {
        double d2 = 0.0;
        double rel[4];
        for (int c = 0; c < D; ++c) {
          rel[c] = im.positions(v, c) + tr[c] - cutoff->center[c];
          d2 += rel[c] * rel[c];
        }
        const double dist = std::sqrt(d2);
        const double phi = cutoff_value(*cutoff, dist);
        const double dphi = cutoff_derivative(*cutoff, dist);
        if (phi == 0.0 && dphi == 0.0) continue;
        q += phi * cell;
        double gdot = 0.0;
        if (dist > 1e-300)
          for (int c = 0; c < D; ++c)
            gdot += dphi * rel[c] / dist * geo.mean_curv(v, c);
        // d/dt int phi dmu = -int phi |H|^2 + int grad(phi).H: the transport
        // term enters with the opposite sign to the dissipation term.
        flux += (phi * h2 - gdot) * cell;
      }
    }
  };

  double acc = 0.0;
  int used = 0;
  for (const auto& snap : trace.snapshots) {
    Immersion im1 = trace.initial, im2 = trace.initial;
    im1.positions = snap.positions;
    im2.positions = snap.positions_next;
    GeometryCache g1, g2;
    compute_geometry(im1, trace.controls.scheme, g1);
    compute_geometry(im2, trace.controls.scheme, g2);
    double q1, f1, q2, f2;
    eval(im1, g1, q1, f1);
    eval(im2, g2, q2, f2);
    const double lhs = (q2 - q1) / snap.dt_next;
    const double rhs = -f1;
    const double denom = std::max(std::abs(lhs), std::abs(rhs));
    acc += denom > 1e-12 ? std::abs(lhs - rhs) / denom : std::abs(lhs - rhs);
    ++used;
  }
  return acc / used;
}

}  // namespace lagflow
