#include "geometry.hpp"

#include <cmath>
#include <limits>

namespace lagflow {

namespace {

constexpr double kDegenerateDet = 1e-24;

// Unwraps theta (in place) along row 0 then down each column, starting from
// the raw principal value at vertex (0,...,0). Records the winding picked up
// around each periodic direction and flags suspiciously large increments.
void unwrap_theta(const Grid& g, VectorXd& th, long winding[2],
                  bool& suspect) {
  suspect = false;
  auto step_to = [&](double from, double raw_to) {
    const double inc = wrap_angle(raw_to - from);
    if (std::abs(inc) > kPi / 2) suspect = true;
    return from + inc;
  };
  if (g.n == 1) {
    const int N = g.shape[0];
    double prev = th[0];
    for (int i = 1; i < N; ++i) {
      prev = step_to(prev, th[i]);
      th[i] = prev;
    }
    winding[0] = std::lround((step_to(th[N - 1], th[0]) - th[0]) / kTwoPi);
    winding[1] = 0;
    return;
  }
  const int N0 = g.shape[0], N1 = g.shape[1];
  double prev = th[g.index(0, 0)];
  for (int j = 1; j < N1; ++j) {
    prev = step_to(prev, th[g.index(0, j)]);
    th[g.index(0, j)] = prev;
  }
  winding[1] =
      std::lround((step_to(th[g.index(0, N1 - 1)], th[g.index(0, 0)]) -
                   th[g.index(0, 0)]) /
                  kTwoPi);
  for (int j = 0; j < N1; ++j) {
    double p = th[g.index(0, j)];
    for (int i = 1; i < N0; ++i) {
      p = step_to(p, th[g.index(i, j)]);
      th[g.index(i, j)] = p;
    }
  }
  winding[0] = std::lround(
      (step_to(th[g.index(N0 - 1, 0)], th[g.index(0, 0)]) - th[g.index(0, 0)]) /
      kTwoPi);
}

}  // namespace

void GeometryCache::perp_component(int v, const double* vec,
                                   double* out) const {
  const int d = dim();
  for (int c = 0; c < d; ++c) out[c] = vec[c];
  for (int a = 0; a < n(); ++a) {
    const double* e = frame.row(v).data() + a * d;
    double dot = 0.0;
    for (int c = 0; c < d; ++c) dot += vec[c] * e[c];
    for (int c = 0; c < d; ++c) out[c] -= dot * e[c];
  }
}

void compute_geometry(const Immersion& im, DiffScheme scheme,
                      GeometryCache& geo, GeomDetail detail,
                      const VectorXd* prev_theta) {
  const Grid grid = Grid::of(im);
  const int n = grid.n, D = 2 * n, V = grid.V;
  geo.grid = grid;
  geo.scheme = scheme;
  geo.detail = detail;

  const MatrixXd* shifts = im.has_shifts() ? &im.periodic_shifts : nullptr;

  // Frames and Hessians of the immersion map.
  static thread_local MatrixXd t0, t1, huu, hvv, huv;
  diff1(grid, im.positions, 0, scheme, shifts, t0);
  diff2(grid, im.positions, 0, scheme, shifts, huu);
  if (n == 2) {
    diff1(grid, im.positions, 1, scheme, shifts, t1);
    diff2(grid, im.positions, 1, scheme, shifts, hvv);
    diff2_mixed(grid, im.positions, scheme, shifts, huv);
  }

  geo.tangent.resize(V, n * D);
  geo.metric.resize(V, n * n);
  geo.metric_inv.resize(V, n * n);
  geo.sqrt_det_g.resize(V);
  geo.frame.resize(V, n * D);
  geo.normal.resize(V, n * D);
  geo.second_fund.resize(V, n * n * n);
  geo.mean_curv.resize(V, D);
  geo.norm_A_sq.resize(V);
  geo.theta.resize(V);
  geo.cos_theta.resize(V);

  geo.cell_volume = 1.0;
  for (int d = 0; d < n; ++d) geo.cell_volume *= grid.h[d];

  double vol = 0.0, maxA = 0.0, maxH = 0.0, minEig =
      std::numeric_limits<double>::infinity();

  for (int v = 0; v < V; ++v) {
    double T[2][4];  // tangent vectors
    for (int c = 0; c < D; ++c) T[0][c] = t0(v, c);
    if (n == 2)
      for (int c = 0; c < D; ++c) T[1][c] = t1(v, c);

    // Metric and inverse.
    double M[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int c = 0; c < D; ++c) s += T[i][c] * T[j][c];
        M[i][j] = M[j][i] = s;
      }
    const double det = n == 1 ? M[0][0] : M[0][0] * M[1][1] - M[0][1] * M[0][1];
    if (!(det > kDegenerateDet))
      throw NumericalError("degenerate metric (det g <= 0) at vertex " +
                           std::to_string(v));
    const double sqg = std::sqrt(det);
    double Minv[2][2];
    if (n == 1) {
      Minv[0][0] = 1.0 / M[0][0];
      minEig = std::min(minEig, std::sqrt(M[0][0]));
    } else {
      Minv[0][0] = M[1][1] / det;
      Minv[1][1] = M[0][0] / det;
      Minv[0][1] = Minv[1][0] = -M[0][1] / det;
      const double tr = M[0][0] + M[1][1];
      const double disc = std::sqrt(std::max(0.0, tr * tr - 4 * det));
      minEig = std::min(minEig, std::sqrt(0.5 * (tr - disc)));
    }

    // Gram-Schmidt orthonormal frame; C maps coordinate to orthonormal
    // indices, e_a = sum_i C[a][i] dF/du_i.
    double E[2][4], C[2][2] = {{0, 0}, {0, 0}};
    const double n0 = std::sqrt(M[0][0]);
    for (int c = 0; c < D; ++c) E[0][c] = T[0][c] / n0;
    C[0][0] = 1.0 / n0;
    if (n == 2) {
      double dot = 0.0;
      for (int c = 0; c < D; ++c) dot += T[1][c] * E[0][c];
      double w[4], nw = 0.0;
      for (int c = 0; c < D; ++c) {
        w[c] = T[1][c] - dot * E[0][c];
        nw += w[c] * w[c];
      }
      nw = std::sqrt(nw);
      if (!(nw > 1e-12))
        throw NumericalError("degenerate tangent frame (rank < n) at vertex " +
                             std::to_string(v));
      for (int c = 0; c < D; ++c) E[1][c] = w[c] / nw;
      C[1][1] = 1.0 / nw;
      C[1][0] = -dot / (n0 * nw);
    }

    double Nu[2][4];
    for (int a = 0; a < n; ++a) apply_J(E[a], Nu[a], n);

    // Second fundamental form: coordinate components against nu, then both
    // indices pushed to the orthonormal frame through C.
    const double* hess[3] = {huu.row(v).data(),
                             n == 2 ? hvv.row(v).data() : nullptr,
                             n == 2 ? huv.row(v).data() : nullptr};
    double hco[2][2][2];  // [alpha][i][j]
    for (int a = 0; a < n; ++a) {
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          const double* hh = (i == j) ? hess[i] : hess[2];
          double s = 0.0;
          for (int c = 0; c < D; ++c) s += hh[c] * Nu[a][c];
          hco[a][i][j] = hco[a][j][i] = s;
        }
    }
    double Asq = 0.0, Hn[2] = {0, 0};
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int bb = 0; bb < n; ++bb) {
          double s = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              s += C[b][i] * C[bb][j] * hco[a][i][j];
          geo.second_fund(v, (a * n + b) * n + bb) = s;
          Asq += s * s;
          if (b == bb) Hn[a] += s;
        }
    double Hv[4] = {0, 0, 0, 0};
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < D; ++c) Hv[c] += Hn[a] * Nu[a][c];
    double Hmag = 0.0;
    for (int c = 0; c < D; ++c) Hmag += Hv[c] * Hv[c];
    Hmag = std::sqrt(Hmag);

    // Lagrangian angle from the complex frame determinant.
    std::complex<double> detZ;
    if (n == 1) {
      detZ = {T[0][0], T[0][1]};
    } else {
      const std::complex<double> z00{T[0][0], T[0][1]}, z10{T[0][2], T[0][3]},
          z01{T[1][0], T[1][1]}, z11{T[1][2], T[1][3]};
      detZ = z00 * z11 - z01 * z10;
    }

    for (int a = 0; a < n; ++a)
      for (int c = 0; c < D; ++c) {
        geo.tangent(v, a * D + c) = T[a][c];
        geo.frame(v, a * D + c) = E[a][c];
        geo.normal(v, a * D + c) = Nu[a][c];
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        geo.metric(v, i * n + j) = M[i][j];
        geo.metric_inv(v, i * n + j) = Minv[i][j];
      }
    geo.sqrt_det_g[v] = sqg;
    for (int c = 0; c < D; ++c) geo.mean_curv(v, c) = Hv[c];
    geo.norm_A_sq[v] = Asq;
    geo.theta[v] = std::arg(detZ);

    vol += sqg;
    maxA = std::max(maxA, Asq);
    maxH = std::max(maxH, Hmag);
  }

  geo.volume = vol * geo.cell_volume;
  geo.max_A_sq = maxA;
  geo.max_H = maxH;
  geo.min_sqrt_metric_eig = minEig;

  if (detail == GeomDetail::MeanCurvatureOnly) {
    geo.min_cos_theta = 0.0;
    return;
  }

  unwrap_theta(grid, geo.theta, geo.winding, geo.unwrap_suspect);
  if (prev_theta && prev_theta->size() == V) {
    const long k =
        std::lround(((*prev_theta)[0] - geo.theta[0]) / kTwoPi);
    if (k != 0) geo.theta.array() += kTwoPi * static_cast<double>(k);
  }
  geo.theta_root = geo.theta[0];

  geo.cos_theta = geo.theta.array().cos();
  geo.min_cos_theta = geo.cos_theta.minCoeff();

  // Tangential gradient of cos(theta); cos is single-valued so plain
  // periodic differences apply.
  static thread_local MatrixXd dv;
  scalar_derivatives(geo, geo.cos_theta, false, scheme, dv);
  intrinsic_grad_sq(geo, dv, geo.grad_cos_sq);
  geo.grad_cos_theta.resize(V, D);
  for (int v = 0; v < V; ++v) {
    for (int c = 0; c < D; ++c) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          s += geo.metric_inv(v, i * n + j) * dv(v, j) *
               geo.tangent(v, i * D + c);
      geo.grad_cos_theta(v, c) = s;
    }
  }
}

double lagrangian_residual(const Immersion& im, DiffScheme scheme) {
  const Grid grid = Grid::of(im);
  const int n = grid.n;
  if (n == 1) {
    // Still validate frame nondegeneracy.
    MatrixXd t0;
    const MatrixXd* shifts = im.has_shifts() ? &im.periodic_shifts : nullptr;
    diff1(grid, im.positions, 0, scheme, shifts, t0);
    for (int v = 0; v < grid.V; ++v)
      if (!(t0.row(v).squaredNorm() > 1e-24))
        throw NumericalError("degenerate tangent frame at vertex " +
                             std::to_string(v));
    return 0.0;
  }
  const MatrixXd* shifts = im.has_shifts() ? &im.periodic_shifts : nullptr;
  MatrixXd t0, t1;
  diff1(grid, im.positions, 0, scheme, shifts, t0);
  diff1(grid, im.positions, 1, scheme, shifts, t1);
  double worst = 0.0;
  for (int v = 0; v < grid.V; ++v) {
    const double g00 = t0.row(v).squaredNorm(), g11 = t1.row(v).squaredNorm();
    double g01 = t0.row(v).dot(t1.row(v));
    if (!(g00 * g11 - g01 * g01 > 1e-24))
      throw NumericalError("degenerate tangent frame (rank < n) at vertex " +
                           std::to_string(v));
    worst = std::max(
        worst, std::abs(symplectic_form(t0.row(v).data(), t1.row(v).data(), n)));
  }
  return worst;
}

double angle_gradient_residual(const GeometryCache& geo) {
  const int n = geo.n(), D = geo.dim(), V = geo.V();
  MatrixXd dth;
  scalar_derivatives(geo, geo.theta, true, geo.scheme, dth);
  VectorXd num(V), a(V), b(V);
  for (int v = 0; v < V; ++v) {
    double gradt[4] = {0, 0, 0, 0};
    for (int c = 0; c < D; ++c) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          s += geo.metric_inv(v, i * n + j) * dth(v, j) *
               geo.tangent(v, i * D + c);
      gradt[c] = s;
    }
    double jg[4];
    apply_J(gradt, jg, n);
    double d2 = 0.0, ha = 0.0, hb = 0.0;
    for (int c = 0; c < D; ++c) {
      const double diff = geo.mean_curv(v, c) - jg[c];
      d2 += diff * diff;
      ha += geo.mean_curv(v, c) * geo.mean_curv(v, c);
      hb += jg[c] * jg[c];
    }
    num[v] = d2;
    a[v] = ha;
    b[v] = hb;
  }
  const double nn = std::sqrt(surface_integral(geo, num));
  const double denom = std::max(std::sqrt(surface_integral(geo, a)),
                                std::sqrt(surface_integral(geo, b)));
  return denom > 1e-12 ? nn / denom : nn;
}

void scalar_derivatives(const GeometryCache& geo, const VectorXd& f,
                        bool angle_field, DiffScheme scheme, MatrixXd& out) {
  const int n = geo.n();
  out.resize(geo.V(), n);
  for (int d = 0; d < n; ++d) {
    if (angle_field) {
      VectorXd tmp;
      diff1_angle(geo.grid, f, d, scheme, tmp);
      out.col(d) = tmp;
    } else {
      MatrixXd tmp;
      diff1(geo.grid, f, d, scheme, nullptr, tmp);
      out.col(d) = tmp.col(0);
    }
  }
}

void intrinsic_grad_sq(const GeometryCache& geo, const MatrixXd& df,
                       VectorXd& out) {
  const int n = geo.n(), V = geo.V();
  out.resize(V);
  for (int v = 0; v < V; ++v) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s += geo.metric_inv(v, i * n + j) * df(v, i) * df(v, j);
    out[v] = s;
  }
}

void laplace_beltrami(const GeometryCache& geo, const VectorXd& f,
                      bool angle_field, DiffScheme scheme, VectorXd& out) {
  const int n = geo.n(), V = geo.V();
  const Grid& g = geo.grid;

  // W_ij = sqrt(g) g^{ij} and its divergence term.
  MatrixXd W(V, n * n);
  for (int v = 0; v < V; ++v)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        W(v, i * n + j) = geo.sqrt_det_g[v] * geo.metric_inv(v, i * n + j);
  MatrixXd bvec(V, n);
  bvec.setZero();
  for (int i = 0; i < n; ++i) {
    MatrixXd dWi;
    diff1(g, W.middleCols(i * n, n), i, scheme, nullptr, dWi);
    bvec += dWi;
  }

  MatrixXd df;
  scalar_derivatives(geo, f, angle_field, scheme, df);

  out.resize(V);
  out.setZero();
  for (int d = 0; d < n; ++d) {
    VectorXd d2;
    if (angle_field) {
      diff2_angle(g, f, d, scheme, d2);
    } else {
      MatrixXd tmp;
      diff2(g, f, d, scheme, nullptr, tmp);
      d2 = tmp.col(0);
    }
    for (int v = 0; v < V; ++v)
      out[v] += geo.metric_inv(v, d * n + d) * d2[v];
  }
  if (n == 2) {
    VectorXd dm;
    if (angle_field) {
      diff2_mixed_angle(g, f, scheme, dm);
    } else {
      MatrixXd tmp;
      diff2_mixed(g, f, scheme, nullptr, tmp);
      dm = tmp.col(0);
    }
    for (int v = 0; v < V; ++v)
      out[v] += 2.0 * geo.metric_inv(v, 1) * dm[v];
  }
  for (int v = 0; v < V; ++v) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += bvec(v, j) * df(v, j);
    out[v] += s / geo.sqrt_det_g[v];
  }
}

double surface_integral(const GeometryCache& geo, const VectorXd& f) {
  return (f.array() * geo.sqrt_det_g.array()).sum() * geo.cell_volume;
}

double l2_norm(const GeometryCache& geo, const VectorXd& f) {
  return std::sqrt(surface_integral(geo, f.array().square().matrix()));
}

std::complex<double> complex_frame_det(const GeometryCache& geo, int v) {
  const int D = geo.dim();
  if (geo.n() == 1)
    return {geo.tangent(v, 0), geo.tangent(v, 1)};
  const std::complex<double> z00{geo.tangent(v, 0), geo.tangent(v, 1)},
      z10{geo.tangent(v, 2), geo.tangent(v, 3)},
      z01{geo.tangent(v, D + 0), geo.tangent(v, D + 1)},
      z11{geo.tangent(v, D + 2), geo.tangent(v, D + 3)};
  return z00 * z11 - z01 * z10;
}

}  // namespace lagflow
