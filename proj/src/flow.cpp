#include "flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace lagflow {

namespace {

// Tangential resampling of a closed curve to uniform arclength; the image is
// unchanged up to interpolation error. n = 1 only.
void redistribute_arclength(Immersion& im) {
  const int N = im.shape[0];
  MatrixXd P = im.positions;
  VectorXd s(N + 1);
  s[0] = 0.0;
  for (int i = 0; i < N; ++i) {
    Eigen::RowVector2d a = P.row(i);
    Eigen::RowVector2d b =
        i + 1 < N ? Eigen::RowVector2d(P.row(i + 1))
                  : Eigen::RowVector2d(P.row(0) + im.periodic_shifts.row(0));
    s[i + 1] = s[i] + (b - a).norm();
  }
  const double L = s[N];
  int seg = 0;
  for (int k = 0; k < N; ++k) {
    const double target = L * k / N;
    while (seg + 1 <= N && s[seg + 1] < target) ++seg;
    const double w = (target - s[seg]) / std::max(s[seg + 1] - s[seg], 1e-300);
    Eigen::RowVector2d a = P.row(seg);
    Eigen::RowVector2d b =
        seg + 1 < N ? Eigen::RowVector2d(P.row(seg + 1))
                    : Eigen::RowVector2d(P.row(0) + im.periodic_shifts.row(0));
    im.positions.row(k) = a + w * (b - a);
  }
}

void fit_T(const FlowTrace& trace, SingularityReport& rep) {
  const auto& log = trace.step_log;
  const size_t K = log.size();
  const size_t first = K - std::max<size_t>(K / 5, std::min<size_t>(K, 10));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t m = 0;
  size_t increases = 0;
  double prev_y = std::numeric_limits<double>::infinity();
  for (size_t i = first; i < K; ++i) {
    if (!(log[i].max_A_sq > 0)) continue;
    const double x = log[i].t, y = 1.0 / log[i].max_A_sq;
    if (y > prev_y * (1.0 + 1e-9)) ++increases;
    prev_y = y;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 3) {
    rep.reliable = false;
    rep.note = "T-estimate-unreliable: too few trailing steps";
    return;
  }
  const double denom = m * sxx - sx * sx;
  const double beta = (m * sxy - sx * sy) / denom;
  const double alpha = (sy - beta * sx) / m;
  if (!(beta < 0)) {
    rep.reliable = false;
    rep.note = "T-estimate-unreliable: 1/max|A|^2 not decreasing";
    return;
  }
  rep.T = -alpha / beta;
  double ss = 0, my = sy / m;
  size_t i2 = 0;
  for (size_t i = first; i < K; ++i) {
    if (!(log[i].max_A_sq > 0)) continue;
    const double y = 1.0 / log[i].max_A_sq;
    const double r = y - (alpha + beta * log[i].t);
    ss += r * r;
    ++i2;
  }
  rep.fit_residual = std::sqrt(ss / i2) / std::max(std::abs(my), 1e-300);
  if (increases > m / 20) {
    rep.reliable = false;
    rep.note = "T-estimate-unreliable: nonmonotone 1/max|A|^2";
  }
}

}  // namespace

std::string FlowControls::key() const {
  std::ostringstream os;
  os.precision(17);
  os << "until=" << until << ";cfl=" << cfl << ";int=" << to_string(integrator)
     << ";sch=" << to_string(scheme) << ";steps=" << max_steps
     << ";budget=" << resolution_budget << ";a2stop=" << max_A_sq_stop
     << ";stride=" << snapshot_stride << ";snaps=" << max_snapshots
     << ";redist=" << redistribute_every;
  return os.str();
}

double adaptive_dt(const GeometryCache& geo, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!std::isfinite(geo.max_A_sq))
    throw NumericalError("max|A|^2 is not finite");
  double hmin = std::numeric_limits<double>::infinity();
  for (int d = 0; d < geo.n(); ++d) hmin = std::min(hmin, geo.grid.h[d]);
  hmin *= geo.min_sqrt_metric_eig;
  double dt = hmin * hmin / 4.0;
  if (geo.max_A_sq > 0) dt = std::min(dt, 1.0 / (2.0 * geo.max_A_sq));
  return cfl * dt;
}

FlowState step(const FlowState& state, double dt, Integrator integrator) {
  if (!(dt > 0)) throw ConfigError("step: dt must be positive");
  FlowState out;
  out.t = state.t + dt;
  out.immersion = state.immersion;

  if (integrator == Integrator::Euler) {
    out.immersion.positions += dt * state.geometry.mean_curv;
  } else {
    Immersion mid = state.immersion;
    mid.positions += (0.5 * dt) * state.geometry.mean_curv;
    GeometryCache mgeo;
    compute_geometry(mid, state.geometry.scheme, mgeo,
                     GeomDetail::MeanCurvatureOnly);
    out.immersion.positions += dt * mgeo.mean_curv;
  }
  if (!out.immersion.positions.allFinite())
    throw NumericalError("nonfinite positions after step (dt too large)");

  compute_geometry(out.immersion, state.geometry.scheme, out.geometry,
                   GeomDetail::Full, &state.geometry.theta);
  if (out.geometry.volume >
      state.geometry.volume * (1.0 + 1e-8))
    throw NumericalError("volume increased beyond tolerance in a step");
  return out;
}

FlowTrace run(const Immersion& im, const FlowControls& controls,
              const ScenarioSpec& scenario) {
  im.validate();
  FlowTrace trace;
  trace.scenario = scenario;
  trace.controls = controls;
  trace.initial = im;

  FlowState st;
  st.t = 0.0;
  st.immersion = im;
  compute_geometry(st.immersion, controls.scheme, st.geometry);

  long accepted = 0;
  int stride = std::max(1, controls.snapshot_stride);
  Snapshot last_pair;
  bool have_last = false;

  auto push_snapshot = [&](Snapshot&& s) {
    trace.snapshots.push_back(std::move(s));
    if (static_cast<int>(trace.snapshots.size()) > controls.max_snapshots) {
      std::vector<Snapshot> thin;
      thin.reserve(trace.snapshots.size() / 2 + 1);
      for (size_t i = 0; i < trace.snapshots.size(); i += 2)
        thin.push_back(std::move(trace.snapshots[i]));
      if ((trace.snapshots.size() - 1) % 2 != 0)
        thin.push_back(std::move(trace.snapshots.back()));
      trace.snapshots = std::move(thin);
      stride *= 2;
    }
  };

  while (true) {
    if (!controls.to_singularity() && st.t >= controls.until - 1e-15) {
      trace.termination = Termination::ReachedTime;
      trace.stop_reason = "reached requested time";
      break;
    }
    if (accepted >= controls.max_steps) {
      trace.termination = Termination::ReachedTime;
      trace.stop_reason = "max_steps exhausted";
      break;
    }

    double dt = adaptive_dt(st.geometry, controls.cfl);
    if (!controls.to_singularity()) dt = std::min(dt, controls.until - st.t);

    FlowState next = step(st, dt, controls.integrator);
    ++accepted;
    trace.step_log.push_back({next.t, dt, next.geometry.volume,
                              next.geometry.max_A_sq,
                              next.geometry.min_cos_theta,
                              next.geometry.max_H});

    last_pair = Snapshot{st.t, dt, st.immersion.positions,
                         next.immersion.positions};
    have_last = true;
    if ((accepted - 1) % stride == 0) push_snapshot(Snapshot(last_pair));

    st = std::move(next);

    if (controls.redistribute_every > 0 && st.immersion.n() == 1 &&
        accepted % controls.redistribute_every == 0) {
      redistribute_arclength(st.immersion);
      const VectorXd prev = st.geometry.theta;
      compute_geometry(st.immersion, controls.scheme, st.geometry,
                       GeomDetail::Full, &prev);
    }

    double hmin = std::numeric_limits<double>::infinity();
    for (int d = 0; d < st.geometry.n(); ++d)
      hmin = std::min(hmin, st.geometry.grid.h[d]);
    hmin *= st.geometry.min_sqrt_metric_eig;
    const bool budget_hit =
        std::sqrt(st.geometry.max_A_sq) * hmin > controls.resolution_budget;
    const bool cap_hit = st.geometry.max_A_sq >= controls.max_A_sq_stop;
    if (budget_hit || cap_hit) {
      trace.termination = Termination::ResolutionExhausted;
      trace.stop_reason = budget_hit ? "resolution budget max|A| h_min exceeded"
                                     : "curvature cap max|A|^2 reached";
      break;
    }
  }

  if (have_last &&
      (trace.snapshots.empty() ||
       trace.snapshots.back().t < last_pair.t - 1e-300))
    trace.snapshots.push_back(last_pair);

  if (trace.termination == Termination::ResolutionExhausted) {
    SingularityReport rep;
    fit_T(trace, rep);
    const GeometryCache geo = trace.snapshot_geometry(
        static_cast<int>(trace.snapshots.size()) - 1, true);
    const Immersion fin = trace.snapshot_immersion(
        static_cast<int>(trace.snapshots.size()) - 1, true);
    int argmax = 0;
    geo.norm_A_sq.maxCoeff(&argmax);
    rep.X0 = fin.positions.row(argmax);
    VectorXd w = geo.norm_A_sq.array() * geo.sqrt_det_g.array();
    rep.X0_refined =
        (fin.positions.transpose() * w) / std::max(w.sum(), 1e-300);
    trace.singularity = std::move(rep);
  }
  return trace;
}

int FlowTrace::nearest_snapshot(double t) const {
  if (snapshots.empty()) throw MissingPrereqError("trace has no snapshots");
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < snapshots.size(); ++i) {
    const double d = std::abs(snapshots[i].t - t);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

Immersion FlowTrace::snapshot_immersion(int idx, bool next) const {
  if (idx < 0 || idx >= static_cast<int>(snapshots.size()))
    throw ConfigError("snapshot index out of range");
  Immersion im = initial;
  im.positions = next ? snapshots[idx].positions_next : snapshots[idx].positions;
  return im;
}

GeometryCache FlowTrace::snapshot_geometry(int idx, bool next) const {
  GeometryCache geo;
  compute_geometry(snapshot_immersion(idx, next), controls.scheme, geo);
  return geo;
}

TypeReport classify_type(const FlowTrace& trace) {
  if (!trace.singularity)
    throw MissingPrereqError("classify_type: trace has no singularity_report");
  TypeReport rep;
  const auto& sing = *trace.singularity;
  for (const auto& e : trace.step_log) {
    if (e.t < sing.T)
      rep.history.emplace_back(e.t, (sing.T - e.t) * e.max_A_sq);
  }
  if (!sing.reliable) {
    rep.kind = TypeReport::Kind::Indeterminate;
    rep.note = sing.note;
    return rep;
  }
  const size_t K = rep.history.size();
  if (K < 10) {
    rep.kind = TypeReport::Kind::Indeterminate;
    rep.note = "too few steps before T";
    return rep;
  }
  std::vector<double> window;
  for (size_t i = K / 10; i < K - K / 10; ++i)
    window.push_back(rep.history[i].second);
  std::vector<double> sorted = window;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double mx = sorted.back(), mn = sorted.front();
  rep.plateau = median;
  rep.oscillation = (mx - mn) / std::max(median, 1e-300);
  rep.kind = rep.oscillation < 0.2 ? TypeReport::Kind::TypeI
                                   : TypeReport::Kind::TypeII;
  return rep;
}

namespace {

// Shared machinery of the evolution-identity residuals: the misfit is
// normalized by the largest individual term of the identity (not by their
// cancelling sum), with an absolute floor so that identically-satisfied
// cases report their roundoff level instead of a noise/noise ratio.
double pair_residual(
    const FlowTrace& trace,
    const std::function<void(const GeometryCache&, const GeometryCache&,
                             double, VectorXd&, std::vector<VectorXd>&)>&
        eval) {
  if (trace.snapshots.empty())
    throw MissingPrereqError("trace has no snapshot pairs");
  double acc = 0.0;
  int used = 0;
  for (const auto& snap : trace.snapshots) {
    Immersion im1 = trace.initial, im2 = trace.initial;
    im1.positions = snap.positions;
    im2.positions = snap.positions_next;
    GeometryCache g1, g2;
    compute_geometry(im1, trace.controls.scheme, g1);
    compute_geometry(im2, trace.controls.scheme, g2, GeomDetail::Full,
                     &g1.theta);
    if (std::abs(wrap_angle(g2.theta_root - g1.theta_root)) > kPi / 2)
      throw NumericalError("theta branch mismatch between snapshots");
    VectorXd lhs_minus_rhs;
    std::vector<VectorXd> terms;
    eval(g1, g2, snap.dt_next, lhs_minus_rhs, terms);
    const double num = l2_norm(g1, lhs_minus_rhs);
    double den = 0.0;
    for (const auto& term : terms) den = std::max(den, l2_norm(g1, term));
    acc += den > 1e-8 ? num / den : num;
    ++used;
  }
  return acc / used;
}

}  // namespace

double theta_heat_residual(const FlowTrace& trace, DiffScheme scheme) {
  return pair_residual(
      trace,
      [&](const GeometryCache& g1, const GeometryCache& g2, double dt,
          VectorXd& diff, std::vector<VectorXd>& terms) {
        const int V = g1.V();
        VectorXd lap;
        laplace_beltrami(g1, g1.theta, true, scheme, lap);
        VectorXd dth(V);
        diff.resize(V);
        for (int v = 0; v < V; ++v) {
          dth[v] = wrap_angle(g2.theta[v] - g1.theta[v]) / dt;
          diff[v] = dth[v] - lap[v];
        }
        terms = {lap, dth};
      });
}

double cos_theta_reaction_residual(const FlowTrace& trace, DiffScheme scheme) {
  return pair_residual(
      trace,
      [&](const GeometryCache& g1, const GeometryCache& g2, double dt,
          VectorXd& diff, std::vector<VectorXd>& terms) {
        const int V = g1.V();
        VectorXd lap;
        laplace_beltrami(g1, g1.cos_theta, false, scheme, lap);
        VectorXd react(V), dv(V);
        diff.resize(V);
        for (int v = 0; v < V; ++v) {
          const double h2 = g1.mean_curv.row(v).squaredNorm();
          react[v] = h2 * g1.cos_theta[v];
          dv[v] = (g2.cos_theta[v] - g1.cos_theta[v]) / dt;
          diff[v] = dv[v] - lap[v] - react[v];
        }
        terms = {lap, react, dv};
      });
}

}  // namespace lagflow
