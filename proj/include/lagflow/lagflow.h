/* lagflow C API: a numerical laboratory for Lagrangian mean curvature flow
 * in flat Calabi-Yau ambients.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return lf_status; on any failure lf_last_error() carries a
 * thread-local message. The lf_cmd_* entry points mirror the CLI and return
 * its exit codes (0 ok, 1 check failure, 2 usage, 3 numerical, 4 missing
 * prerequisite).
 */
#ifndef LAGFLOW_H
#define LAGFLOW_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define LAGFLOW_API_VERSION 1

typedef enum lf_status {
  LF_OK = 0,
  LF_ERR_CHECK_FAILED = 1,
  LF_ERR_USAGE = 2,
  LF_ERR_NUMERICAL = 3,
  LF_ERR_MISSING_PREREQ = 4,
  LF_ERR_HYPOTHESIS = 5,
  LF_ERR_INTERNAL = 70
} lf_status;

typedef struct lf_immersion lf_immersion;
typedef struct lf_geometry lf_geometry;
typedef struct lf_trace lf_trace;

int lf_api_version(void);

/* Thread-local message describing the most recent failure. */
const char* lf_last_error(void);

/* ---- scenarios and geometry -------------------------------------------- */

/* scenario_json, e.g.
 *   {"name": "clifford_torus", "r0": 1.0, "resolution": 64}
 * Catalog: circle, graph_curve, clifford_torus, lagrangian_graph,
 * perturbed_clifford. */
lf_status lf_scenario_build(const char* scenario_json, lf_immersion** out);
void lf_immersion_free(lf_immersion* im);
lf_status lf_immersion_info(const lf_immersion* im, int* complex_dim,
                            int* vertex_count);

/* Max over vertices and index pairs of |omega(dF/du_i, dF/du_j)|. */
lf_status lf_lagrangian_residual(const lf_immersion* im, double* out);

lf_status lf_geometry_compute(const lf_immersion* im, lf_geometry** out);
void lf_geometry_free(lf_geometry* geo);

/* Named scalars: "volume", "max_A_sq", "min_cos_theta", "max_H",
 * "theta_root", "angle_gradient_residual". */
lf_status lf_geometry_scalar(const lf_geometry* geo, const char* name,
                             double* out);

/* ---- flow ---------------------------------------------------------------*/

/* controls_json (all fields optional), e.g.
 *   {"until": "singularity", "cfl": 0.2, "integrator": "rk2",
 *    "scheme": "order4", "snapshot_stride": 1, "max_snapshots": 512} */
lf_status lf_flow_run(const lf_immersion* im, const char* controls_json,
                      lf_trace** out);
void lf_trace_free(lf_trace* trace);

/* Summary of the run (termination, estimated T, X0, type report) as a JSON
 * string; free with lf_string_free. */
lf_status lf_trace_summary(const lf_trace* trace, char** json_out);
void lf_string_free(char* s);

lf_status lf_trace_save(const lf_trace* trace, const char* dir);
lf_status lf_trace_load(const char* dir, lf_trace** out);
lf_status lf_trace_snapshot_count(const lf_trace* trace, int* out);

/* ---- monitors ----------------------------------------------------------*/

/* Gaussian density Phi at snapshot `snapshot` with kernel centered at
 * `center` (length 2n) and reference time t0 (t0 <= 0 means the estimated
 * singular time). cutoff_radius <= 0 disables the cutoff. */
lf_status lf_gaussian_density(const lf_trace* trace, int snapshot,
                              const double* center, double t0,
                              double cutoff_radius, double* out);

/* Weighted functional Psi (weight 1/cos theta); fails with
 * LF_ERR_HYPOTHESIS when cos(theta) <= 0 on the cutoff support. */
lf_status lf_weighted_psi(const lf_trace* trace, int snapshot,
                          const double* center, double t0,
                          double cutoff_radius, double* out);

/* ---- command-level pipelines (CLI mirrors) ------------------------------*/

int lf_cmd_run(const char* config_path, const char* out_dir);
int lf_cmd_blowup(const char* trace_dir, const char* params_json_or_null);
/* suites_csv: comma-separated suite names, or NULL/"" for all suites. */
int lf_cmd_verify(const char* suites_csv, const char* config_path_or_null,
                  const char* report_path);
int lf_cmd_plot(const char* csv_path, const char* kind);

#ifdef __cplusplus
}
#endif

#endif /* LAGFLOW_H */
