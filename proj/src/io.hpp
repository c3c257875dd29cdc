#pragma once

#include <json.hpp>

#include "blowup.hpp"
#include "monitors.hpp"
#include "planes.hpp"
#include "verify.hpp"

namespace lagflow {
namespace io {

using nlohmann::json;

constexpr int kFormatVersion = 1;

// A kernel as configured: t0 may be pinned to the estimated singular time.
struct KernelConfig {
  VectorXd center;
  double t0 = 0.0;
  bool t0_is_T = false;
  double cutoff_radius = -1.0;

  KernelSpec resolve(const FlowTrace& trace) const;
};

// Parsed and validated run configuration (see docs/formats.md).
struct RunConfig {
  ScenarioSpec scenario;
  FlowControls controls;
  std::vector<KernelConfig> kernels;
  int lambda_max_exponent = 3;
  std::uint64_t seed = 12345;
};

RunConfig parse_run_config(const json& j);
RunConfig load_run_config(const std::string& path);

// Trace directory layout:
//   manifest.json   scenario, ambient, grid, controls, termination
//   trace.csv       t, dt, volume, max_A_sq, min_cos_theta, max_H
//   summary.json    termination, T estimate, X0, type indicator stats
//   snapshots/snap_NNNNNN.json
//   indicator.csv   (t, indicator), only when a singularity was reported
void save_trace(const FlowTrace& trace, const std::string& dir);
FlowTrace load_trace(const std::string& dir);

void write_trace_csv(const FlowTrace& trace, const std::string& path);
void write_summary_json(const FlowTrace& trace, const std::string& path);
void write_indicator_csv(const TypeReport& report, const std::string& path);
void write_psi_csv(const PsiReport& report, const std::string& path);

json cloud_to_json(const RescaledCloud& cloud);
void write_cloud_json(const RescaledCloud& cloud, const std::string& path);

void write_planes_json(const PlaneCluster& cluster, const WitnessReport* witness,
                       const std::string& path);

void write_decay_csv(const DecayReport& report, double R, double s1, double s2,
                     const std::string& path);
void write_density_csv(const std::vector<std::pair<double, std::vector<double>>>&
                           ratios_per_lambda,
                       const std::vector<double>& rhos,
                       const std::string& path);

// report.json: sorted CheckResult list; byte-stable for identical configs.
void write_report_json(const std::vector<CheckResult>& checks,
                       const std::vector<std::string>& suites,
                       const json& config_echo, const std::string& path);

// Minimal CSV reader for the plot command; leading '#' lines are comments,
// the first non-comment line is the header.
struct Csv {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
Csv read_csv(const std::string& path);

json load_json_file(const std::string& path);
void write_json_file(const json& j, const std::string& path);

}  // namespace io
}  // namespace lagflow
