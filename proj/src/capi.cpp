#include "lagflow/lagflow.h"

#include <cstring>
#include <string>

#include "io.hpp"
#include "pipeline.hpp"

namespace {

thread_local std::string g_last_error;

lf_status fail(lf_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

lf_status translate(const std::exception& e) {
  using namespace lagflow;
  if (dynamic_cast<const ConfigError*>(&e))
    return fail(LF_ERR_USAGE, e.what());
  if (dynamic_cast<const HypothesisError*>(&e))
    return fail(LF_ERR_HYPOTHESIS, e.what());
  if (dynamic_cast<const MissingPrereqError*>(&e))
    return fail(LF_ERR_MISSING_PREREQ, e.what());
  if (dynamic_cast<const NumericalError*>(&e))
    return fail(LF_ERR_NUMERICAL, e.what());
  return fail(LF_ERR_INTERNAL, e.what());
}

lagflow::io::json parse_json_arg(const char* text, const char* what) {
  try {
    return lagflow::io::json::parse(text);
  } catch (const std::exception& e) {
    throw lagflow::ConfigError(std::string("invalid JSON for ") + what + ": " +
                               e.what());
  }
}

lagflow::FlowControls parse_controls(const char* controls_json) {
  using lagflow::io::json;
  json j = json::object();
  if (controls_json && *controls_json)
    j = parse_json_arg(controls_json, "controls");
  json wrapped;
  // Reuse the run-config parser; a scenario stub satisfies its schema.
  wrapped["scenario"] = {{"name", "circle"}, {"resolution", 8}, {"r0", 1.0}};
  wrapped["controls"] = j;
  return lagflow::io::parse_run_config(wrapped).controls;
}

}  // namespace

struct lf_immersion {
  lagflow::Immersion im;
  lagflow::ScenarioSpec spec;
};

struct lf_geometry {
  lagflow::GeometryCache geo;
};

struct lf_trace {
  lagflow::FlowTrace trace;
};

extern "C" {

int lf_api_version(void) { return LAGFLOW_API_VERSION; }

const char* lf_last_error(void) { return g_last_error.c_str(); }

lf_status lf_scenario_build(const char* scenario_json, lf_immersion** out) {
  if (!scenario_json || !out)
    return fail(LF_ERR_USAGE, "null argument to lf_scenario_build");
  try {
    lagflow::io::json wrapped;
    wrapped["scenario"] = parse_json_arg(scenario_json, "scenario");
    const lagflow::io::RunConfig cfg = lagflow::io::parse_run_config(wrapped);
    auto* handle = new lf_immersion{lagflow::build_scenario(cfg.scenario),
                                    cfg.scenario};
    *out = handle;
    return LF_OK;
  } catch (const std::exception& e) {
    return translate(e);
  }
}

void lf_immersion_free(lf_immersion* im) { delete im; }

lf_status lf_immersion_info(const lf_immersion* im, int* complex_dim,
                            int* vertex_count) {
  if (!im) return fail(LF_ERR_USAGE, "null immersion");
  if (complex_dim) *complex_dim = im->im.n();
  if (vertex_count) *vertex_count = im->im.vertex_count();
  return LF_OK;
}

lf_status lf_lagrangian_residual(const lf_immersion* im, double* out) {
  if (!im || !out) return fail(LF_ERR_USAGE, "null argument");
  try {
    *out = lagflow::lagrangian_residual(im->im);
    return LF_OK;
  } catch (const std::exception& e) {
    return translate(e);
  }
}

lf_status lf_geometry_compute(const lf_immersion* im, lf_geometry** out) {
  if (!im || !out) return fail(LF_ERR_USAGE, "null argument");
  try {
    auto* handle = new lf_geometry;
    lagflow::compute_geometry(im->im, lagflow::DiffScheme::Order4,
                              handle->geo);
    *out = handle;
    return LF_OK;
  } catch (const std::exception& e) {
    return translate(e);
  }
}

void lf_geometry_free(lf_geometry* geo) { delete geo; }

lf_status lf_geometry_scalar(const lf_geometry* geo, const char* name,
                             double* out) {
  if (!geo || !name || !out) return fail(LF_ERR_USAGE, "null argument");
  const std::string key = name;
  if (key == "volume")
    *out = geo->geo.volume;
  else if (key == "max_A_sq")
    *out = geo->geo.max_A_sq;
  else if (key == "min_cos_theta")
    *out = geo->geo.min_cos_theta;
  else if (key == "max_H")
    *out = geo->geo.max_H;
  else if (key == "theta_root")
    *out = geo->geo.theta_root;
  else if (key == "angle_gradient_residual")
    *out = lagflow::angle_gradient_residual(geo->geo);
  else
    return fail(LF_ERR_USAGE, "unknown geometry scalar: " + key);
  return LF_OK;
}

lf_status lf_flow_run(const lf_immersion* im, const char* controls_json,
                      lf_trace** out) {
  if (!im || !out) return fail(LF_ERR_USAGE, "null argument");
  try {
    const lagflow::FlowControls controls = parse_controls(controls_json);
    auto* handle =
        new lf_trace{lagflow::run(im->im, controls, im->spec)};
    *out = handle;
    return LF_OK;
  } catch (const std::exception& e) {
    return translate(e);
  }
}

void lf_trace_free(lf_trace* trace) { delete trace; }

lf_status lf_trace_summary(const lf_trace* trace, char** json_out) {
  if (!trace || !json_out) return fail(LF_ERR_USAGE, "null argument");
  try {
    // Reuse the summary writer through a scratch file-free path: build the
    // JSON directly.
    const auto& tr = trace->trace;
    lagflow::io::json j;
    j["termination"] = tr.termination == lagflow::Termination::ReachedTime
                           ? "reached_time"
                           : "resolution_exhausted";
    j["stop_reason"] = tr.stop_reason;
    j["steps"] = tr.step_log.size();
    if (tr.singularity) {
      j["estimated_T"] = tr.singularity->T;
      j["T_reliable"] = tr.singularity->reliable;
      lagflow::io::json x0 = lagflow::io::json::array();
      for (int i = 0; i < tr.singularity->X0.size(); ++i)
        x0.push_back(tr.singularity->X0[i]);
      j["X0"] = x0;
    }
    const std::string s = j.dump();
    char* buf = new char[s.size() + 1];
    std::memcpy(buf, s.c_str(), s.size() + 1);
    *json_out = buf;
    return LF_OK;
  } catch (const std::exception& e) {
    return translate(e);
  }
}

void lf_string_free(char* s) { delete[] s; }

lf_status lf_trace_save(const lf_trace* trace, const char* dir) {
  if (!trace || !dir) return fail(LF_ERR_USAGE, "null argument");
  try {
    lagflow::io::save_trace(trace->trace, dir);
    return LF_OK;
  } catch (const std::exception& e) {
    return translate(e);
  }
}

lf_status lf_trace_load(const char* dir, lf_trace** out) {
  if (!dir || !out) return fail(LF_ERR_USAGE, "null argument");
  try {
    auto* handle = new lf_trace{lagflow::io::load_trace(dir)};
    *out = handle;
    return LF_OK;
  } catch (const std::exception& e) {
    return translate(e);
  }
}

lf_status lf_trace_snapshot_count(const lf_trace* trace, int* out) {
  if (!trace || !out) return fail(LF_ERR_USAGE, "null argument");
  *out = static_cast<int>(trace->trace.snapshots.size());
  return LF_OK;
}

namespace {

lf_status kernel_eval(const lf_trace* trace, int snapshot, const double* center,
                      double t0, double cutoff_radius, bool weighted,
                      double* out) {
  if (!trace || !center || !out) return fail(LF_ERR_USAGE, "null argument");
  try {
    const auto& tr = trace->trace;
    if (snapshot < 0 || snapshot >= static_cast<int>(tr.snapshots.size()))
      return fail(LF_ERR_USAGE, "snapshot index out of range");
    lagflow::KernelSpec spec;
    spec.center =
        Eigen::Map<const lagflow::VectorXd>(center, 2 * tr.n());
    if (t0 <= 0) {
      if (!tr.singularity)
        return fail(LF_ERR_MISSING_PREREQ,
                    "t0 <= 0 requires a singularity report");
      spec.t0 = tr.singularity->T;
    } else {
      spec.t0 = t0;
    }
    spec.cutoff_radius = cutoff_radius;
    const lagflow::Immersion im = tr.snapshot_immersion(snapshot);
    lagflow::GeometryCache geo;
    lagflow::compute_geometry(im, tr.controls.scheme, geo);
    const double t = tr.snapshots[snapshot].t;
    *out = weighted ? lagflow::weighted_psi(im, geo, t, spec)
                    : lagflow::gaussian_density(im, geo, t, spec);
    return LF_OK;
  } catch (const std::exception& e) {
    return translate(e);
  }
}

}  // namespace

lf_status lf_gaussian_density(const lf_trace* trace, int snapshot,
                              const double* center, double t0,
                              double cutoff_radius, double* out) {
  return kernel_eval(trace, snapshot, center, t0, cutoff_radius, false, out);
}

lf_status lf_weighted_psi(const lf_trace* trace, int snapshot,
                          const double* center, double t0,
                          double cutoff_radius, double* out) {
  return kernel_eval(trace, snapshot, center, t0, cutoff_radius, true, out);
}

int lf_cmd_run(const char* config_path, const char* out_dir) {
  if (!config_path || !out_dir) return LF_ERR_USAGE;
  return lagflow::pipeline::cmd_run(config_path, out_dir);
}

int lf_cmd_blowup(const char* trace_dir, const char* params_json_or_null) {
  if (!trace_dir) return LF_ERR_USAGE;
  return lagflow::pipeline::cmd_blowup(
      trace_dir, params_json_or_null ? params_json_or_null : "");
}

int lf_cmd_verify(const char* suites_csv, const char* config_path_or_null,
                  const char* report_path) {
  if (!report_path) return LF_ERR_USAGE;
  std::vector<std::string> suites;
  if (suites_csv && *suites_csv) {
    std::string s = suites_csv;
    size_t pos = 0;
    while (true) {
      const size_t comma = s.find(',', pos);
      suites.push_back(s.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return lagflow::pipeline::cmd_verify(
      suites, config_path_or_null ? config_path_or_null : "", report_path);
}

int lf_cmd_plot(const char* csv_path, const char* kind) {
  if (!csv_path || !kind) return LF_ERR_USAGE;
  return lagflow::pipeline::cmd_plot(csv_path, kind);
}

}  // extern "C"
