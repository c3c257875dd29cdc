#include "planes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace lagflow {

namespace {

// Flattened orthogonal projector of the point's tangent plane.
void point_projector(const RescaledCloud& cloud, int v, MatrixXd& P) {
  const int D = cloud.dim();
  P.setZero(D, D);
  for (int a = 0; a < cloud.n; ++a) {
    Eigen::VectorXd e = cloud.frame.row(v).segment(a * D, D);
    P += e * e.transpose();
  }
}

double frob_dist(const MatrixXd& A, const MatrixXd& B) {
  return (A - B).norm();
}

// Nearest rank-n orthogonal projector to a symmetric matrix.
MatrixXd nearest_projector(const MatrixXd& M, int n) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  const int D = static_cast<int>(M.rows());
  MatrixXd P = MatrixXd::Zero(D, D);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd e = es.eigenvectors().col(D - 1 - k);
    P += e * e.transpose();
  }
  return P;
}

// Weighted least-squares plane through the origin: top-n eigenvectors of the
// second moment of the cluster's points.
MatrixXd moment_basis(const RescaledCloud& cloud, const std::vector<int>& idx,
                      int n) {
  const int D = cloud.dim();
  MatrixXd mom = MatrixXd::Zero(D, D);
  for (int v : idx) {
    Eigen::VectorXd x = cloud.points.row(v);
    mom += cloud.weights[v] * x * x.transpose();
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(mom);
  MatrixXd basis(n, D);
  for (int k = 0; k < n; ++k)
    basis.row(k) = es.eigenvectors().col(D - 1 - k).transpose();
  return basis;
}

double point_plane_dist(const MatrixXd& basis, const Eigen::VectorXd& x) {
  Eigen::VectorXd r = x;
  for (int a = 0; a < basis.rows(); ++a)
    r -= basis.row(a).dot(x) * basis.row(a).transpose();
  return r.norm();
}

RescaledCloud subcloud(const RescaledCloud& cloud, const std::vector<int>& idx) {
  RescaledCloud c;
  c.scale_type = RescaledCloud::ScaleType::Synthetic;
  c.n = cloud.n;
  const int D = cloud.dim(), m = static_cast<int>(idx.size());
  c.points.resize(m, D);
  c.weights.resize(m);
  c.frame.resize(m, cloud.frame.cols());
  c.theta.resize(m);
  c.cos_theta.resize(m);
  c.grad_v_norm.resize(m);
  c.A_sq.resize(m);
  c.second_fund.resize(m, cloud.second_fund.cols());
  c.mean_curv.resize(m, D);
  c.cell_size.resize(m);
  for (int k = 0; k < m; ++k) {
    const int v = idx[k];
    c.points.row(k) = cloud.points.row(v);
    c.weights[k] = cloud.weights[v];
    c.frame.row(k) = cloud.frame.row(v);
    c.theta[k] = cloud.theta[v];
    c.cos_theta[k] = cloud.cos_theta[v];
    c.grad_v_norm[k] = cloud.grad_v_norm[v];
    c.A_sq[k] = cloud.A_sq[v];
    c.second_fund.row(k) = cloud.second_fund.row(v);
    c.mean_curv.row(k) = cloud.mean_curv.row(v);
    c.cell_size[k] = cloud.cell_size[v];
  }
  return c;
}

}  // namespace

PlaneCluster fit_planes(const RescaledCloud& cloud, const FitParams& params) {
  if (cloud.has_shifts())
    throw ConfigError("fit_planes expects a non-periodic cloud");
  const int V = cloud.size(), n = cloud.n, D = cloud.dim();
  const double total_weight = cloud.weights.sum();

  std::vector<MatrixXd> proj(V);
  for (int v = 0; v < V; ++v) point_projector(cloud, v, proj[v]);

  std::vector<int> assign(V, -1);
  std::vector<char> blocked(V, 0);
  std::vector<MatrixXd> centers;

  auto collect = [&](const MatrixXd& P, int cluster) {
    for (int v = 0; v < V; ++v) {
      if (assign[v] >= 0 && assign[v] != cluster) continue;
      const bool in = frob_dist(proj[v], P) < params.grassmann_threshold;
      assign[v] = in ? cluster : -1;
    }
  };

  // Greedy seeding by weight, then projector-mean refinement.
  while (static_cast<int>(centers.size()) < params.max_planes) {
    int seed = -1;
    double best = 0.0;
    for (int v = 0; v < V; ++v)
      if (assign[v] < 0 && !blocked[v] && cloud.weights[v] > best) {
        best = cloud.weights[v];
        seed = v;
      }
    if (seed < 0) break;
    const int cid = static_cast<int>(centers.size());
    MatrixXd P = proj[seed];
    collect(P, cid);
    for (int it = 0; it < params.refine_iters; ++it) {
      MatrixXd M = MatrixXd::Zero(D, D);
      double w = 0.0;
      for (int v = 0; v < V; ++v)
        if (assign[v] == cid) {
          M += cloud.weights[v] * proj[v];
          w += cloud.weights[v];
        }
      if (w == 0) break;
      P = nearest_projector(M / w, n);
      collect(P, cid);
    }
    double w = 0.0;
    for (int v = 0; v < V; ++v)
      if (assign[v] == cid) w += cloud.weights[v];
    if (w < params.min_cluster_weight * total_weight) {
      for (int v = 0; v < V; ++v)
        if (assign[v] == cid) assign[v] = -1;
      blocked[seed] = 1;
      continue;
    }
    centers.push_back(P);
  }

  // RANSAC fallback: propose planes from random unassigned tangent
  // projectors, score by point-to-plane inlier weight.
  double unassigned = 0.0;
  for (int v = 0; v < V; ++v)
    if (assign[v] < 0) unassigned += cloud.weights[v];
  if (unassigned / total_weight > params.unassigned_bound &&
      static_cast<int>(centers.size()) < params.max_planes) {
    std::mt19937_64 rng(params.seed);
    std::vector<int> pool;
    for (int v = 0; v < V; ++v)
      if (assign[v] < 0) pool.push_back(v);
    double med_cell = 0.0;
    {
      std::vector<double> cs(cloud.cell_size.data(),
                             cloud.cell_size.data() + V);
      std::nth_element(cs.begin(), cs.begin() + V / 2, cs.end());
      med_cell = cs[V / 2];
    }
    for (int trial = 0;
         trial < params.ransac_trials && !pool.empty() &&
         static_cast<int>(centers.size()) < params.max_planes;
         ++trial) {
      const int v0 = pool[rng() % pool.size()];
      MatrixXd basis(n, D);
      for (int a = 0; a < n; ++a)
        basis.row(a) = cloud.frame.row(v0).segment(a * D, D);
      std::vector<int> inliers;
      double w = 0.0;
      for (int v : pool) {
        if (point_plane_dist(basis, cloud.points.row(v)) <
                3.0 * std::max(med_cell, 1e-12) &&
            frob_dist(proj[v], proj[v0]) < 2.0 * params.grassmann_threshold) {
          inliers.push_back(v);
          w += cloud.weights[v];
        }
      }
      if (w >= params.min_cluster_weight * total_weight) {
        const int cid = static_cast<int>(centers.size());
        MatrixXd M = MatrixXd::Zero(D, D);
        for (int v : inliers) M += cloud.weights[v] * proj[v];
        centers.push_back(nearest_projector(M / w, n));
        for (int v : inliers) assign[v] = cid;
        std::vector<int> np;
        for (int v : pool)
          if (assign[v] < 0) np.push_back(v);
        pool = std::move(np);
      }
    }
  }

  // Global reassignment.
  for (int round = 0; round < 3; ++round) {
    for (int v = 0; v < V; ++v) {
      double bd = params.grassmann_threshold;
      int bc = -1;
      for (size_t c = 0; c < centers.size(); ++c) {
        const double d = frob_dist(proj[v], centers[c]);
        if (d < bd) {
          bd = d;
          bc = static_cast<int>(c);
        }
      }
      assign[v] = bc;
    }
    for (size_t c = 0; c < centers.size(); ++c) {
      MatrixXd M = MatrixXd::Zero(D, D);
      double w = 0.0;
      for (int v = 0; v < V; ++v)
        if (assign[v] == static_cast<int>(c)) {
          M += cloud.weights[v] * proj[v];
          w += cloud.weights[v];
        }
      if (w > 0) centers[c] = nearest_projector(M / w, n);
    }
  }

  PlaneCluster out;
  double un = 0.0;
  for (int v = 0; v < V; ++v)
    if (assign[v] < 0) un += cloud.weights[v];
  out.unassigned_fraction = un / total_weight;
  out.plane_like = out.unassigned_fraction <= params.unassigned_bound;
  if (!out.plane_like)
    out.note = "unassigned fraction exceeds bound: cloud is not plane-like";

  for (size_t c = 0; c < centers.size(); ++c) {
    std::vector<int> idx;
    for (int v = 0; v < V; ++v)
      if (assign[v] == static_cast<int>(c)) idx.push_back(v);
    if (idx.empty()) continue;
    FittedPlane p;
    p.basis = moment_basis(cloud, idx, n);
    double w = 0.0, res = 0.0, mth = 0.0, mcos = 0.0;
    for (int v : idx) {
      const double d = point_plane_dist(p.basis, cloud.points.row(v));
      w += cloud.weights[v];
      res += cloud.weights[v] * d * d;
      mth += cloud.weights[v] * cloud.theta[v];
      mcos += cloud.weights[v] * cloud.cos_theta[v];
    }
    p.weight_fraction = w / total_weight;
    p.fit_residual = std::sqrt(res / w);
    p.mean_theta = mth / w;
    p.mean_cos_theta = mcos / w;
    const RescaledCloud sc = subcloud(cloud, idx);
    const double rho = 0.5 * params.ball_radius;
    p.density_ratio_raw =
        cloud_ball_measure(sc, VectorXd::Zero(D), rho) /
        (unit_ball_volume(n) * std::pow(rho, n));
    p.multiplicity = std::max(1, static_cast<int>(std::lround(
                                     p.density_ratio_raw)));
    out.planes.push_back(std::move(p));
  }
  std::sort(out.planes.begin(), out.planes.end(),
            [](const FittedPlane& a, const FittedPlane& b) {
              return a.weight_fraction > b.weight_fraction;
            });
  return out;
}

AngleConstancyReport angle_constancy(const RescaledCloud& cloud, double r,
                                     double R) {
  AngleConstancyReport rep;
  const int V = cloud.size();
  std::vector<int> centers;
  for (int v = 0; v < V; ++v)
    if (cloud.points.row(v).norm() <= 0.5 * R) centers.push_back(v);
  const int stride = std::max<int>(1, static_cast<int>(centers.size()) / 40);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (size_t k = 0; k < centers.size(); k += stride) {
    const Eigen::VectorXd xi = cloud.points.row(centers[k]);
    double w = 0.0, acc = 0.0;
    for (int v = 0; v < V; ++v) {
      if ((cloud.points.row(v).transpose() - xi).norm() <= r) {
        w += cloud.weights[v];
        acc += cloud.weights[v] * cloud.cos_theta[v];
      }
    }
    if (w <= 0) continue;
    const double avg = acc / w;
    lo = std::min(lo, avg);
    hi = std::max(hi, avg);
    ++rep.centers_used;
  }
  rep.oscillation = rep.centers_used > 0 ? hi - lo : 0.0;
  double gi = 0.0;
  for (int v = 0; v < V; ++v)
    if (cloud.points.row(v).norm() <= R)
      gi += cloud.weights[v] * cloud.grad_v_norm[v];
  rep.grad_integral = gi;
  return rep;
}

WitnessReport complex_structure_witness(const PlaneCluster& cluster,
                                        double angle_tol) {
  WitnessReport rep;
  if (cluster.planes.empty()) {
    rep.reason = "no fitted planes";
    return rep;
  }
  if (cluster.planes.front().basis.cols() != 4) {
    rep.reason = "witness construction is specific to n = 2";
    return rep;
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, wsum = 0.0,
         acc = 0.0;
  for (const auto& p : cluster.planes) {
    lo = std::min(lo, p.mean_cos_theta);
    hi = std::max(hi, p.mean_cos_theta);
    acc += p.weight_fraction * p.mean_cos_theta;
    wsum += p.weight_fraction;
  }
  if (hi - lo > angle_tol) {
    rep.reason = "plane angles disagree: cos(theta) spread " +
                 std::to_string(hi - lo) + " exceeds tolerance";
    return rep;
  }
  const double t0 = acc / wsum;
  rep.theta0_weight = t0;
  if (std::abs(t0) < 1e-3) {
    rep.reason = "calibration weight too close to zero for the J* scaling";
    return rep;
  }

  // J* on ambient coordinates (x1, y1, x2, y2):
  //   x1 -> t0 y1, y1 -> -x1/t0, x2 -> y2/t0, y2 -> -t0 x2.
  Eigen::Matrix4d Js = Eigen::Matrix4d::Zero();
  Js(1, 0) = t0;
  Js(0, 1) = -1.0 / t0;
  Js(3, 2) = 1.0 / t0;
  Js(2, 3) = -t0;
  rep.J_star = Js;

  // J' on the starred coordinates w = (x1, y1/t0, x2/t0, y2): block
  // diag(I, -I); its complex lines are the planes unit-calibrated by
  // Re(dz*_1 ^ dz*_2).
  Eigen::Matrix4d Jp = Eigen::Matrix4d::Zero();
  Jp(0, 1) = -1;
  Jp(1, 0) = 1;
  Jp(2, 3) = 1;
  Jp(3, 2) = -1;
  rep.J_prime = Jp;

  Eigen::Vector4d dscale(1.0, 1.0 / t0, 1.0 / t0, 1.0);
  double worst = 0.0;
  for (const auto& p : cluster.planes) {
    MatrixXd W = p.basis;  // rows to starred coordinates
    for (int a = 0; a < W.rows(); ++a)
      for (int c = 0; c < 4; ++c) W(a, c) *= dscale[c];
    // Orthonormalize rows in the starred metric.
    Eigen::HouseholderQR<MatrixXd> qr(W.transpose());
    MatrixXd Q = qr.householderQ() * MatrixXd::Identity(4, W.rows());
    MatrixXd P = Q * Q.transpose();
    const double res = (Jp * P - P * Jp * P).norm();
    worst = std::max(worst, res);
  }
  rep.max_invariance_residual = worst;
  rep.found = true;
  return rep;
}

FlatnessReport flatness_check(const RescaledCloud& cloud, double R) {
  FlatnessReport rep;
  const int n = cloud.n;
  double w = 0.0, a2 = 0.0, dh = 0.0;
  for (int v = 0; v < cloud.size(); ++v) {
    if (cloud.points.row(v).norm() > R) continue;
    w += cloud.weights[v];
    a2 += cloud.weights[v] * cloud.A_sq[v];
    double det_stat = 0.0;
    if (n == 1) {
      det_stat = std::abs(cloud.second_fund(v, 0));
    } else {
      for (int a = 0; a < n; ++a) {
        const double h00 = cloud.second_fund(v, (a * n + 0) * n + 0);
        const double h01 = cloud.second_fund(v, (a * n + 0) * n + 1);
        const double h11 = cloud.second_fund(v, (a * n + 1) * n + 1);
        det_stat += std::abs(h00 * h11 - h01 * h01);
      }
    }
    dh += cloud.weights[v] * det_stat;
  }
  if (w > 0) {
    rep.rms_A = std::sqrt(a2 / w);
    rep.mean_abs_det_h = dh / w;
  }
  return rep;
}

double max_principal_angle(const MatrixXd& A, const MatrixXd& B) {
  Eigen::JacobiSVD<MatrixXd> svd(A * B.transpose());
  const double smin = svd.singularValues().minCoeff();
  return std::acos(std::clamp(smin, -1.0, 1.0));
}

}  // namespace lagflow
