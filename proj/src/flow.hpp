#pragma once

#include <optional>

#include "geometry.hpp"
#include "scenarios.hpp"

namespace lagflow {

struct FlowState {
  double t = 0.0;
  Immersion immersion;
  GeometryCache geometry;
};

struct FlowControls {
  // until < 0 means "run to singularity".
  double until = -1.0;
  double cfl = 0.2;
  Integrator integrator = Integrator::RK2;
  DiffScheme scheme = DiffScheme::Order4;
  long max_steps = 600000;
  // Stop rules for singularity runs. The resolution budget max|A| h_min is
  // scale-invariant on exact self-shrinkers, so a curvature cap is needed to
  // terminate those runs at all.
  double resolution_budget = 0.5;
  double max_A_sq_stop = 4000.0;
  // Snapshot policy: record every `snapshot_stride`-th accepted step (as a
  // consecutive state pair, so dt-residuals are computable anywhere in the
  // trace); thin by dropping every other snapshot once `max_snapshots` is
  // reached. Uniform-in-step spacing is geometric in T - t near a shrinker.
  int snapshot_stride = 1;
  int max_snapshots = 512;
  // Curve-only tangential arclength redistribution (off by default).
  int redistribute_every = 0;

  bool to_singularity() const { return until < 0; }
  std::string key() const;
};

struct StepLogEntry {
  double t, dt, volume, max_A_sq, min_cos_theta, max_H;
};

// A recorded state and its immediate successor (dt apart).
struct Snapshot {
  double t = 0.0;
  double dt_next = 0.0;
  MatrixXd positions;
  MatrixXd positions_next;
};

enum class Termination { ReachedTime, ResolutionExhausted };

struct SingularityReport {
  double T = 0.0;              // least-squares fit of 1/max|A|^2 ~ a (T - t)
  bool reliable = true;        // false when 1/max|A|^2 was not decreasing
  double fit_residual = 0.0;
  VectorXd X0;                 // position of the vertex maximizing |A| at the
                               // final snapshot
  VectorXd X0_refined;         // |A|^2-weighted centroid at the final
                               // snapshot; the better blow-up center
  std::string note;
};

struct FlowTrace {
  ScenarioSpec scenario;
  FlowControls controls;
  Immersion initial;
  std::vector<StepLogEntry> step_log;
  std::vector<Snapshot> snapshots;
  Termination termination = Termination::ReachedTime;
  std::optional<SingularityReport> singularity;
  std::string stop_reason;

  int n() const { return initial.n(); }
  // Snapshot whose time is nearest to t; throws when the trace is empty.
  int nearest_snapshot(double t) const;
  GeometryCache snapshot_geometry(int idx, bool next = false) const;
  Immersion snapshot_immersion(int idx, bool next = false) const;
};

struct TypeReport {
  enum class Kind { TypeI, TypeII, Indeterminate } kind = Kind::Indeterminate;
  double plateau = 0.0;     // median of (T-t) max|A|^2 over the window
  double oscillation = 0.0; // (max-min)/median over the middle 80%
  std::vector<std::pair<double, double>> history;  // (t, indicator)
  std::string note;
};

// dt = cfl * min(h_min^2 / 4, 1 / (2 max|A|^2)) with h_min the smallest
// parametric spacing times the smallest metric eigenvalue square root.
double adaptive_dt(const GeometryCache& geo, double cfl);

// One explicit step of dF/dt = H. Geometry is recomputed on the result with
// the theta branch continued from `state`.
FlowState step(const FlowState& state, double dt,
               Integrator integrator = Integrator::RK2);

FlowTrace run(const Immersion& im, const FlowControls& controls,
              const ScenarioSpec& scenario = {});

TypeReport classify_type(const FlowTrace& trace);

// Discrete residuals of the evolution identities, averaged over the recorded
// snapshot pairs. First order in dt, second order in h at the scheme used for
// the scalar derivatives (order-2 by default, matching the discretization the
// residual certifies).
double theta_heat_residual(const FlowTrace& trace,
                           DiffScheme scheme = DiffScheme::Order2);
double cos_theta_reaction_residual(const FlowTrace& trace,
                                   DiffScheme scheme = DiffScheme::Order2);

}  // namespace lagflow
