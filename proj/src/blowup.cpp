#include "blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace lagflow {

namespace {

std::vector<VectorXd> cloud_translates(const RescaledCloud& cloud,
                                       const VectorXd& center, double reach) {
  const int D = cloud.dim();
  std::vector<VectorXd> out;
  if (!cloud.has_shifts()) {
    out.push_back(VectorXd::Zero(D));
    return out;
  }
  VectorXd lo = cloud.points.colwise().minCoeff();
  VectorXd hi = cloud.points.colwise().maxCoeff();
  const double total =
      reach + (hi - lo).norm() + (center - 0.5 * (lo + hi)).norm();
  std::vector<int> K(cloud.n, 0);
  for (int d = 0; d < cloud.n; ++d) {
    const double nrm = cloud.shifts.row(d).norm();
    K[d] = nrm > 0 ? static_cast<int>(std::ceil(total / nrm)) + 1 : 0;
  }
  if (cloud.n == 1) {
    for (int k = -K[0]; k <= K[0]; ++k)
      out.push_back(k * cloud.shifts.row(0).transpose());
  } else {
    for (int k0 = -K[0]; k0 <= K[0]; ++k0)
      for (int k1 = -K[1]; k1 <= K[1]; ++k1)
        out.push_back(k0 * cloud.shifts.row(0).transpose() +
                      k1 * cloud.shifts.row(1).transpose());
  }
  return out;
}

double rescale_sigma(double T, double t) {
  const double gap = T - t;
  if (!(gap > 0)) throw ConfigError("time_rescale: snapshot at or beyond T");
  return 1.0 / std::sqrt(2.0 * gap);
}

struct RescaleFrame {
  double T;
  VectorXd center;
};

RescaleFrame resolve_frame(const FlowTrace& trace,
                           const std::optional<double>& T_override,
                           const std::optional<VectorXd>& center_override) {
  RescaleFrame f;
  if (T_override) {
    f.T = *T_override;
  } else {
    if (!trace.singularity)
      throw MissingPrereqError("trace has no singularity_report");
    if (!trace.singularity->reliable)
      throw MissingPrereqError("T estimate unreliable: " +
                               trace.singularity->note);
    f.T = trace.singularity->T;
  }
  if (center_override)
    f.center = *center_override;
  else if (trace.singularity)
    f.center = trace.singularity->X0_refined;
  else
    f.center = VectorXd::Zero(2 * trace.n());
  return f;
}

}  // namespace

void RescaledCloud::perp_component(int v, const double* vec,
                                   double* out) const {
  const int D = dim();
  for (int c = 0; c < D; ++c) out[c] = vec[c];
  for (int a = 0; a < n; ++a) {
    const double* e = frame.row(v).data() + a * D;
    double dot = 0.0;
    for (int c = 0; c < D; ++c) dot += vec[c] * e[c];
    for (int c = 0; c < D; ++c) out[c] -= dot * e[c];
  }
}

void RescaledCloud::validate() const {
  if (weights.minCoeff() <= 0)
    throw NumericalError("cloud weights must be positive");
  for (int v = 0; v < size(); ++v)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double dot = 0.0;
        for (int c = 0; c < dim(); ++c)
          dot += frame(v, a * dim() + c) * frame(v, b * dim() + c);
        const double want = a == b ? 1.0 : 0.0;
        if (std::abs(dot - want) > 1e-10)
          throw NumericalError("cloud tangent basis not orthonormal");
      }
}

RescaledCloud make_cloud(const Immersion& im, const GeometryCache& geo,
                         const VectorXd& center, double sigma,
                         RescaledCloud::ScaleType type, double t_source) {
  if (!(sigma > 0)) throw ConfigError("rescale factor must be positive");
  const int V = geo.V(), n = geo.n(), D = geo.dim();
  RescaledCloud c;
  c.scale_type = type;
  c.scale = sigma;
  c.t_source = t_source;
  c.n = n;
  c.points.resize(V, D);
  for (int v = 0; v < V; ++v)
    for (int k = 0; k < D; ++k)
      c.points(v, k) = sigma * (im.positions(v, k) - center[k]);
  c.weights = geo.sqrt_det_g * geo.cell_volume * std::pow(sigma, n);
  c.frame = geo.frame;
  c.theta = geo.theta;
  c.cos_theta = geo.cos_theta;
  c.grad_v_norm = geo.grad_cos_sq.array().sqrt() / sigma;
  c.A_sq = geo.norm_A_sq / (sigma * sigma);
  c.second_fund = geo.second_fund / sigma;
  c.mean_curv = geo.mean_curv / sigma;
  c.shifts = im.periodic_shifts * sigma;
  c.cell_size.resize(V);
  for (int v = 0; v < V; ++v) {
    double ell = 0.0;
    for (int d = 0; d < n; ++d)
      ell = std::max(ell, geo.tangent.row(v).segment(d * D, D).norm() *
                              geo.grid.h[d] * sigma);
    c.cell_size[v] = ell;
  }
  return c;
}

RescaledCloud concat_clouds(const RescaledCloud& a, const RescaledCloud& b) {
  if (a.n != b.n) throw ConfigError("cloud dimensions differ");
  if (a.has_shifts() || b.has_shifts())
    throw ConfigError("cannot concatenate periodic clouds");
  RescaledCloud c = a;
  auto stack = [](const MatrixXd& x, const MatrixXd& y) {
    MatrixXd z(x.rows() + y.rows(), x.cols());
    z << x, y;
    return z;
  };
  auto vstack = [](const VectorXd& x, const VectorXd& y) {
    VectorXd z(x.size() + y.size());
    z << x, y;
    return z;
  };
  c.points = stack(a.points, b.points);
  c.weights = vstack(a.weights, b.weights);
  c.frame = stack(a.frame, b.frame);
  c.theta = vstack(a.theta, b.theta);
  c.cos_theta = vstack(a.cos_theta, b.cos_theta);
  c.grad_v_norm = vstack(a.grad_v_norm, b.grad_v_norm);
  c.A_sq = vstack(a.A_sq, b.A_sq);
  c.second_fund = stack(a.second_fund, b.second_fund);
  c.mean_curv = stack(a.mean_curv, b.mean_curv);
  c.cell_size = vstack(a.cell_size, b.cell_size);
  return c;
}

RescaledCloud lambda_rescale(const FlowTrace& trace, double lambda, double t) {
  if (!(lambda > 0)) throw ConfigError("lambda must be positive");
  if (!(t < 0)) throw ConfigError("lambda_rescale: t must be negative");
  const RescaleFrame f = resolve_frame(trace, {}, {});
  const double t_req = f.T + t / (lambda * lambda);
  if (trace.snapshots.empty())
    throw MissingPrereqError("trace has no snapshots");
  if (t_req < trace.snapshots.front().t - 1e-12 ||
      t_req > trace.snapshots.back().t + trace.snapshots.back().dt_next + 1e-12)
    throw ConfigError("requested time outside trace coverage");
  const int idx = trace.nearest_snapshot(t_req);
  const Immersion im = trace.snapshot_immersion(idx);
  const GeometryCache geo = trace.snapshot_geometry(idx);
  RescaledCloud c = make_cloud(im, geo, f.center, lambda,
                               RescaledCloud::ScaleType::Lambda,
                               trace.snapshots[idx].t);
  return c;
}

TimeRescaleResult time_rescale(const FlowTrace& trace,
                               std::optional<double> T_override,
                               std::optional<VectorXd> center_override) {
  const RescaleFrame f = resolve_frame(trace, T_override, center_override);
  TimeRescaleResult out;
  for (size_t i = 0; i < trace.snapshots.size(); ++i) {
    const double t = trace.snapshots[i].t;
    if (!(f.T - t > 1e-14)) continue;
    const double sigma = rescale_sigma(f.T, t);
    const Immersion im = trace.snapshot_immersion(static_cast<int>(i));
    const GeometryCache geo = trace.snapshot_geometry(static_cast<int>(i));
    RescaledCloud c = make_cloud(im, geo, f.center, sigma,
                                 RescaledCloud::ScaleType::TimeDependent, t);
    c.s = -0.5 * std::log(f.T - t);

    // The scaling identities are algebraic; recomputing the geometry on the
    // rescaled positions must reproduce the carried values to roundoff.
    Immersion rim = im;
    for (int v = 0; v < rim.vertex_count(); ++v)
      rim.positions.row(v) =
          sigma * (im.positions.row(v) - f.center.transpose());
    rim.periodic_shifts = im.periodic_shifts * sigma;
    GeometryCache rgeo;
    compute_geometry(rim, trace.controls.scheme, rgeo);
    for (int v = 0; v < rgeo.V(); ++v) {
      const double dev = std::abs(rgeo.norm_A_sq[v] - c.A_sq[v]) /
                         std::max(std::abs(rgeo.norm_A_sq[v]), 1e-9);
      out.max_identity_dev = std::max(out.max_identity_dev, dev);
    }
    out.clouds.push_back(std::move(c));
  }
  if (out.clouds.empty())
    throw MissingPrereqError("no snapshots strictly before T");
  return out;
}

double rescaled_flow_residual(const FlowTrace& trace,
                              std::optional<double> T_override,
                              std::optional<VectorXd> center_override) {
  const RescaleFrame f = resolve_frame(trace, T_override, center_override);
  double acc = 0.0;
  int used = 0;
  for (const auto& snap : trace.snapshots) {
    const double t1 = snap.t, t2 = snap.t + snap.dt_next;
    if (!(f.T - t2 > 1e-14)) continue;
    const double s1 = rescale_sigma(f.T, t1), s2 = rescale_sigma(f.T, t2);
    const double ds = -0.5 * (std::log(f.T - t2) - std::log(f.T - t1));
    Immersion im1 = trace.initial;
    im1.positions = snap.positions;
    GeometryCache g1;
    compute_geometry(im1, trace.controls.scheme, g1);
    const int V = g1.V(), D = g1.dim();
    VectorXd num(V), dh(V), df(V);
    for (int v = 0; v < V; ++v) {
      double n2 = 0, h2 = 0, f2 = 0;
      for (int c = 0; c < D; ++c) {
        const double F1 = s1 * (snap.positions(v, c) - f.center[c]);
        const double F2 = s2 * (snap.positions_next(v, c) - f.center[c]);
        const double Ht = g1.mean_curv(v, c) / s1;
        const double r = (F2 - F1) / ds - Ht - F1;
        n2 += r * r;
        h2 += Ht * Ht;
        f2 += F1 * F1;
      }
      num[v] = n2;
      dh[v] = h2;
      df[v] = f2;
    }
    const double nn = std::sqrt(surface_integral(g1, num));
    const double den = std::max(std::sqrt(surface_integral(g1, dh)),
                                std::sqrt(surface_integral(g1, df)));
    acc += den > 1e-8 ? nn / den : nn;
    ++used;
  }
  if (used == 0) throw MissingPrereqError("no snapshot pairs before T");
  return acc / used;
}

double self_shrinker_residual(const RescaledCloud& cloud) {
  const int D = cloud.dim();
  const auto translates =
      cloud_translates(cloud, VectorXd::Zero(D), 10.0);
  double acc = 0.0;
  double pos[4], perp[4];
  for (int v = 0; v < cloud.size(); ++v) {
    for (const auto& tr : translates) {
      double x2 = 0.0;
      for (int c = 0; c < D; ++c) {
        pos[c] = cloud.points(v, c) + tr[c];
        x2 += pos[c] * pos[c];
      }
      const double w = std::exp(-0.5 * x2);
      if (w < 1e-300) continue;
      cloud.perp_component(v, pos, perp);
      double r2 = 0.0;
      for (int c = 0; c < D; ++c) {
        const double z = cloud.mean_curv(v, c) + perp[c];
        r2 += z * z;
      }
      acc += cloud.weights[v] * w * r2;
    }
  }
  return std::sqrt(acc);
}

double rescaled_theta_identity(const FlowTrace& trace, DiffScheme scheme,
                               std::optional<double> T_override,
                               std::optional<VectorXd> center_override) {
  const RescaleFrame f = resolve_frame(trace, T_override, center_override);
  double acc = 0.0;
  int used = 0;
  for (const auto& snap : trace.snapshots) {
    const double t1 = snap.t, t2 = snap.t + snap.dt_next;
    if (!(f.T - t2 > 1e-14)) continue;
    const double ds = -0.5 * (std::log(f.T - t2) - std::log(f.T - t1));
    Immersion im1 = trace.initial, im2 = trace.initial;
    im1.positions = snap.positions;
    im2.positions = snap.positions_next;
    GeometryCache g1, g2;
    compute_geometry(im1, trace.controls.scheme, g1);
    compute_geometry(im2, trace.controls.scheme, g2, GeomDetail::Full,
                     &g1.theta);
    VectorXd lap;
    laplace_beltrami(g1, g1.cos_theta, false, scheme, lap);
    const int V = g1.V();
    VectorXd diff(V), lapt(V), react(V), dvs(V);
    const double twoTt = 2.0 * (f.T - t1);
    for (int v = 0; v < V; ++v) {
      lapt[v] = twoTt * lap[v];
      react[v] = twoTt * g1.mean_curv.row(v).squaredNorm() * g1.cos_theta[v];
      dvs[v] = (g2.cos_theta[v] - g1.cos_theta[v]) / ds;
      diff[v] = dvs[v] - lapt[v] - react[v];
    }
    const double nn = l2_norm(g1, diff);
    const double den = std::max({l2_norm(g1, lapt), l2_norm(g1, react),
                                 l2_norm(g1, dvs)});
    acc += den > 1e-8 ? nn / den : nn;
    ++used;
  }
  if (used == 0) throw MissingPrereqError("no snapshot pairs before T");
  return acc / used;
}

bool RescaledPsiReport::monotone_within(double tol) const {
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    if (!rows[i].refused && !rows[i + 1].refused && rows[i].dpsi_ds > tol)
      return false;
  return true;
}

double RescaledPsiReport::max_dpsi_ds() const {
  double m = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    if (!rows[i].refused) m = std::max(m, rows[i].dpsi_ds);
  return m;
}

RescaledPsiReport rescaled_psi_monotonicity(
    const std::vector<RescaledCloud>& clouds, const KernelSpec& cutoff) {
  RescaledPsiReport rep;
  for (const auto& cloud : clouds) {
    RescaledPsiRow row;
    row.s = cloud.s;
    const int D = cloud.dim();
    const auto translates = cloud_translates(cloud, VectorXd::Zero(D), 10.0);
    bool bad = false;
    double psi = 0, d1 = 0, d2 = 0, d3 = 0;
    double pos[4], perp[4];
    for (int v = 0; v < cloud.size() && !bad; ++v) {
      for (const auto& tr : translates) {
        double x2 = 0.0;
        for (int c = 0; c < D; ++c) {
          pos[c] = cloud.points(v, c) + tr[c];
          x2 += pos[c] * pos[c];
        }
        const double dist = std::sqrt(x2);
        const double phi = cutoff_value(cutoff, dist);
        if (phi == 0.0) continue;
        const double vv = cloud.cos_theta[v];
        if (!(vv > 0)) {
          bad = true;
          row.reason = "cos(theta) <= 0 on the cutoff support at s = " +
                       std::to_string(cloud.s);
          break;
        }
        const double rho = std::exp(-0.5 * x2);
        const double w = cloud.weights[v] * phi * rho;
        psi += w / vv;
        cloud.perp_component(v, pos, perp);
        double shr = 0.0, h2 = 0.0;
        for (int c = 0; c < D; ++c) {
          const double z = cloud.mean_curv(v, c) + perp[c];
          shr += z * z;
          h2 += cloud.mean_curv(v, c) * cloud.mean_curv(v, c);
        }
        d1 += w / vv * shr;
        d2 += w / vv * 0.5 * h2;
        d3 += w * 2.0 / (vv * vv * vv) * cloud.grad_v_norm[v] *
              cloud.grad_v_norm[v];
      }
    }
    if (bad) {
      row.refused = true;
      ++rep.refusals;
    } else {
      row.psi = psi;
      row.diss_shrinker = d1;
      row.diss_mean_curv = d2;
      row.diss_grad = d3;
    }
    rep.rows.push_back(std::move(row));
  }
  for (size_t i = 0; i + 1 < rep.rows.size(); ++i) {
    if (rep.rows[i].refused || rep.rows[i + 1].refused) continue;
    const double ds = rep.rows[i + 1].s - rep.rows[i].s;
    if (!(ds > 0)) continue;
    rep.rows[i].dpsi_ds = (rep.rows[i + 1].psi - rep.rows[i].psi) / ds;
    rep.rows[i].margin = rep.rows[i].dpsi_ds + rep.rows[i].diss_shrinker +
                         rep.rows[i].diss_mean_curv + rep.rows[i].diss_grad;
  }
  return rep;
}

std::vector<double> DecayReport::h_ratios() const {
  std::vector<double> r;
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    r.push_back(rows[i].mean_curv_sq > 0
                    ? rows[i + 1].mean_curv_sq / rows[i].mean_curv_sq
                    : 0.0);
  return r;
}

DecayReport integral_decay_report(const FlowTrace& trace,
                                  const std::vector<double>& lambdas, double R,
                                  double s1, double s2) {
  if (!trace.singularity)
    throw MissingPrereqError(
        "integral_decay_report: trace has no singularity_report");
  if (!(s1 < s2 && s2 <= 0))
    throw ConfigError("decay window needs s1 < s2 <= 0");
  const auto& sing = *trace.singularity;
  const int n = trace.n(), D = 2 * n;

  DecayReport rep;
  for (double lam : lambdas) {
    DecayRow row;
    row.lambda = lam;
    const double ta = sing.T + s1 / (lam * lam);
    const double tb = sing.T + s2 / (lam * lam);
    double Ig = 0, Ih = 0, If = 0;
    int count = 0;
    for (size_t i = 0; i < trace.snapshots.size(); ++i) {
      const double t = trace.snapshots[i].t;
      if (t < ta || t > tb) continue;
      const GeometryCache geo = trace.snapshot_geometry(static_cast<int>(i));
      const Immersion im = trace.snapshot_immersion(static_cast<int>(i));
      double g = 0, h = 0, fp = 0;
      for (int v = 0; v < geo.V(); ++v) {
        double d2 = 0.0;
        double rel[4];
        for (int c = 0; c < D; ++c) {
          rel[c] = im.positions(v, c) - sing.X0_refined[c];
          d2 += lam * rel[c] * lam * rel[c];
        }
        if (std::sqrt(d2) > R) continue;
        const double w = geo.sqrt_det_g[v] * geo.cell_volume *
                         std::pow(lam, n);
        double perp[4];
        geo.perp_component(v, rel, perp);
        double p2 = 0.0;
        for (int c = 0; c < D; ++c) p2 += perp[c] * perp[c];
        g += geo.grad_cos_sq[v] / (lam * lam) * w;
        h += geo.mean_curv.row(v).squaredNorm() / (lam * lam) * w;
        fp += p2 * lam * lam * w;
      }
      Ig += g;
      Ih += h;
      If += fp;
      ++count;
    }
    row.snapshots_used = count;
    row.window_covered = count > 0;
    if (count > 0) {
      // Mean-value time quadrature over the rescaled window of length s2-s1.
      const double win = s2 - s1;
      Ig = Ig / count * win;
      Ih = Ih / count * win;
      If = If / count * win;
    }
    row.grad_cos_sq = Ig;
    row.mean_curv_sq = Ih;
    row.position_perp_sq = If;
    rep.rows.push_back(row);
  }
  return rep;
}

double cloud_ball_measure(const RescaledCloud& cloud, const VectorXd& xi,
                          double rho) {
  const int D = cloud.dim();
  const auto translates = cloud_translates(cloud, xi, rho);
  double acc = 0.0;
  for (int v = 0; v < cloud.size(); ++v) {
    for (const auto& tr : translates) {
      double d2 = 0.0;
      for (int c = 0; c < D; ++c) {
        const double x = cloud.points(v, c) + tr[c] - xi[c];
        d2 += x * x;
      }
      const double dist = std::sqrt(d2);
      const double ell = cloud.cell_size[v];
      const double frac =
          ell > 0 ? std::clamp(0.5 + (rho - dist) / ell, 0.0, 1.0)
                  : (dist <= rho ? 1.0 : 0.0);
      if (frac > 0) acc += cloud.weights[v] * frac;
    }
  }
  return acc;
}

std::vector<double> density_ratio(const RescaledCloud& cloud,
                                  const VectorXd& xi,
                                  const std::vector<double>& rhos) {
  for (size_t i = 0; i + 1 < rhos.size(); ++i)
    if (!(rhos[i] > 0 && rhos[i] < rhos[i + 1]))
      throw ConfigError("rho list must be positive and increasing");
  const double wn = unit_ball_volume(cloud.n);
  std::vector<double> out;
  for (double rho : rhos) {
    const double m = cloud_ball_measure(cloud, xi, rho);
    if (m <= 0) throw NumericalError("empty ball in density_ratio");
    out.push_back(m / (wn * std::pow(rho, cloud.n)));
  }
  return out;
}

bool nondecreasing_within(const std::vector<double>& seq, double tol) {
  for (size_t i = 0; i + 1 < seq.size(); ++i)
    if (seq[i + 1] < seq[i] - tol) return false;
  return true;
}

double cloud_gaussian_density(const RescaledCloud& cloud, const VectorXd& X0,
                              double s) {
  if (!(s > 0)) throw ConfigError("cloud_gaussian_density needs s > 0");
  const int D = cloud.dim();
  const auto translates = cloud_translates(cloud, X0, std::sqrt(166.0 * s));
  const double norm = std::pow(4.0 * kPi * s, -0.5 * cloud.n);
  double acc = 0.0;
  for (int v = 0; v < cloud.size(); ++v) {
    for (const auto& tr : translates) {
      double d2 = 0.0;
      for (int c = 0; c < D; ++c) {
        const double x = cloud.points(v, c) + tr[c] - X0[c];
        d2 += x * x;
      }
      acc += cloud.weights[v] * norm * std::exp(-d2 / (4.0 * s));
    }
  }
  return acc;
}

std::vector<IsoperimetricRow> intrinsic_ball_report(
    const Immersion& im, const GeometryCache& geo, int center_vertex,
    const std::vector<double>& rhos) {
  const Grid& g = geo.grid;
  const int V = g.V, n = g.n, D = im.dim();
  if (center_vertex < 0 || center_vertex >= V)
    throw ConfigError("center vertex out of range");

  // Edge set: axis neighbors plus (n = 2) diagonals, with periodic shifts.
  auto edge_length = [&](int a, int di, int dj) {
    int ia, ja;
    g.coords(a, ia, ja);
    int wi = 0, wj = 0;
    int ib = ia + di, jb = ja + dj;
    while (ib < 0) { ib += g.shape[0]; --wi; }
    while (ib >= g.shape[0]) { ib -= g.shape[0]; ++wi; }
    if (n == 2) {
      while (jb < 0) { jb += g.shape[1]; --wj; }
      while (jb >= g.shape[1]) { jb -= g.shape[1]; ++wj; }
    } else {
      jb = 0;
    }
    const int b = g.index(ib, jb);
    double len2 = 0.0;
    for (int c = 0; c < D; ++c) {
      double diff = im.positions(b, c) - im.positions(a, c);
      diff += wi * im.periodic_shifts(0, c);
      if (n == 2) diff += wj * im.periodic_shifts(1, c);
      len2 += diff * diff;
    }
    return std::pair<int, double>{b, std::sqrt(len2)};
  };

  std::vector<double> dist(V, std::numeric_limits<double>::infinity());
  dist[center_vertex] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  queue.push({0.0, center_vertex});
  std::vector<std::pair<int, int>> offsets = {{1, 0}, {-1, 0}};
  if (n == 2) {
    offsets.insert(offsets.end(),
                   {{0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
  }
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& [di, dj] : offsets) {
      const auto [b, len] = edge_length(v, di, dj);
      if (d + len < dist[b]) {
        dist[b] = d + len;
        queue.push({d + len, b});
      }
    }
  }

  std::vector<IsoperimetricRow> rows;
  for (double rho : rhos) {
    if (!(rho > 0)) throw ConfigError("rho must be positive");
    double area = 0.0;
    for (int v = 0; v < V; ++v)
      if (dist[v] <= rho) area += geo.sqrt_det_g[v] * geo.cell_volume;
    rows.push_back({rho, area / std::pow(rho, n)});
  }
  return rows;
}

int max_dyadic_exponent(const FlowTrace& trace, double R,
                        double target_spacing) {
  int K = 0;
  for (int k = 0; k <= 24; ++k) {
    try {
      const RescaledCloud c = lambda_rescale(trace, std::pow(2.0, k), -0.25);
      double worst = 0.0;
      for (int v = 0; v < c.size(); ++v)
        if (c.points.row(v).norm() <= R)
          worst = std::max(worst, c.cell_size[v]);
      if (worst > target_spacing) break;
      K = k;
    } catch (const std::exception&) {
      break;
    }
  }
  return K;
}

}  // namespace lagflow
