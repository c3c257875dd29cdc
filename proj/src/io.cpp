#include "io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace lagflow {
namespace io {

namespace fs = std::filesystem;

namespace {

json vec_to_json(const VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_to_json(const MatrixXd& m) {  // flat, row-major
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

MatrixXd mat_from_json(const json& a, int rows, int cols) {
  if (!a.is_array() || static_cast<int>(a.size()) != rows * cols)
    throw ConfigError("array has wrong length for " + std::to_string(rows) +
                      "x" + std::to_string(cols) + " matrix");
  MatrixXd m(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = a[k++].get<double>();
  return m;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const std::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
}

KernelSpec KernelConfig::resolve(const FlowTrace& trace) const {
  KernelSpec spec;
  spec.center = center;
  spec.cutoff_radius = cutoff_radius;
  if (t0_is_T) {
    if (!trace.singularity)
      throw MissingPrereqError(
          "kernel t0 = \"T\" requires a singularity report");
    spec.t0 = trace.singularity->T;
  } else {
    spec.t0 = t0;
  }
  return spec;
}

RunConfig parse_run_config(const json& j) {
  require(j.is_object(), "top level must be an object");
  require(j.contains("scenario") && j["scenario"].is_object(),
          "missing 'scenario' object");
  RunConfig cfg;

  const auto& sc = j["scenario"];
  require(sc.contains("name") && sc["name"].is_string(),
          "scenario.name must be a string");
  cfg.scenario.name = sc["name"].get<std::string>();
  require(sc.contains("resolution"), "scenario.resolution is required");
  if (sc["resolution"].is_number_integer()) {
    cfg.scenario.resolution = {sc["resolution"].get<int>()};
  } else if (sc["resolution"].is_array()) {
    for (const auto& v : sc["resolution"]) {
      require(v.is_number_integer(), "resolution entries must be integers");
      cfg.scenario.resolution.push_back(v.get<int>());
    }
  } else {
    require(false, "scenario.resolution must be an integer or array");
  }
  for (const auto& [k, v] : sc.items()) {
    if (k == "name" || k == "resolution") continue;
    require(v.is_number(), "scenario parameter '" + k + "' must be a number");
    cfg.scenario.params[k] = v.get<double>();
  }

  if (j.contains("controls")) {
    const auto& ct = j["controls"];
    require(ct.is_object(), "'controls' must be an object");
    if (ct.contains("until")) {
      if (ct["until"].is_string()) {
        require(ct["until"] == "singularity",
                "controls.until must be a number or \"singularity\"");
        cfg.controls.until = -1.0;
      } else {
        require(ct["until"].is_number(), "controls.until must be a number");
        cfg.controls.until = ct["until"].get<double>();
        require(cfg.controls.until >= 0, "controls.until must be >= 0");
      }
    }
    cfg.controls.cfl = ct.value("cfl", cfg.controls.cfl);
    require(cfg.controls.cfl > 0 && cfg.controls.cfl <= 1,
            "controls.cfl must lie in (0, 1]");
    if (ct.contains("integrator"))
      cfg.controls.integrator =
          parse_integrator(ct["integrator"].get<std::string>());
    if (ct.contains("scheme"))
      cfg.controls.scheme = parse_scheme(ct["scheme"].get<std::string>());
    cfg.controls.max_steps = ct.value("max_steps", cfg.controls.max_steps);
    cfg.controls.max_A_sq_stop =
        ct.value("max_A_sq_stop", cfg.controls.max_A_sq_stop);
    cfg.controls.resolution_budget =
        ct.value("resolution_budget", cfg.controls.resolution_budget);
    cfg.controls.snapshot_stride =
        ct.value("snapshot_stride", cfg.controls.snapshot_stride);
    cfg.controls.max_snapshots =
        ct.value("max_snapshots", cfg.controls.max_snapshots);
    cfg.controls.redistribute_every =
        ct.value("redistribute_every", cfg.controls.redistribute_every);
  }

  if (j.contains("kernels")) {
    require(j["kernels"].is_array(), "'kernels' must be an array");
    for (const auto& k : j["kernels"]) {
      KernelConfig kc;
      require(k.contains("center") && k["center"].is_array(),
              "kernel.center must be an array");
      kc.center.resize(k["center"].size());
      for (size_t i = 0; i < k["center"].size(); ++i)
        kc.center[i] = k["center"][i].get<double>();
      require(k.contains("t0"), "kernel.t0 is required");
      if (k["t0"].is_string()) {
        require(k["t0"] == "T", "kernel.t0 must be a number or \"T\"");
        kc.t0_is_T = true;
      } else {
        kc.t0 = k["t0"].get<double>();
      }
      if (k.contains("cutoff_radius") && !k["cutoff_radius"].is_null()) {
        kc.cutoff_radius = k["cutoff_radius"].get<double>();
        require(kc.cutoff_radius > 0, "kernel.cutoff_radius must be positive");
      }
      cfg.kernels.push_back(std::move(kc));
    }
  }

  cfg.lambda_max_exponent = j.value("lambda_max", cfg.lambda_max_exponent);
  require(cfg.lambda_max_exponent >= 0 && cfg.lambda_max_exponent <= 24,
          "lambda_max must lie in [0, 24]");
  cfg.seed = j.value("seed", cfg.seed);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(load_json_file(path));
}

void write_trace_csv(const FlowTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# format_version: " << kFormatVersion << "\n";
  out << "t,dt,volume,max_A_sq,min_cos_theta,max_H\n";
  for (const auto& e : trace.step_log)
    out << fmt_double(e.t) << "," << fmt_double(e.dt) << ","
        << fmt_double(e.volume) << "," << fmt_double(e.max_A_sq) << ","
        << fmt_double(e.min_cos_theta) << "," << fmt_double(e.max_H) << "\n";
}

void write_summary_json(const FlowTrace& trace, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["scenario"] = trace.scenario.name;
  j["termination"] = trace.termination == Termination::ReachedTime
                         ? "reached_time"
                         : "resolution_exhausted";
  j["stop_reason"] = trace.stop_reason;
  j["steps"] = trace.step_log.size();
  if (!trace.step_log.empty()) {
    j["final"] = {{"t", trace.step_log.back().t},
                  {"volume", trace.step_log.back().volume},
                  {"max_A_sq", trace.step_log.back().max_A_sq},
                  {"min_cos_theta", trace.step_log.back().min_cos_theta}};
  }
  if (trace.singularity) {
    const auto& s = *trace.singularity;
    j["singularity"] = {{"estimated_T", s.T},
                        {"reliable", s.reliable},
                        {"fit_residual", s.fit_residual},
                        {"X0", vec_to_json(s.X0)},
                        {"X0_refined", vec_to_json(s.X0_refined)},
                        {"note", s.note}};
    try {
      const TypeReport rep = classify_type(trace);
      const char* kind = rep.kind == TypeReport::Kind::TypeI
                             ? "I"
                             : rep.kind == TypeReport::Kind::TypeII
                                   ? "II"
                                   : "indeterminate";
      j["type"] = {{"classification", kind},
                   {"indicator_plateau", rep.plateau},
                   {"indicator_oscillation", rep.oscillation}};
    } catch (const std::exception&) {
      j["type"] = nullptr;
    }
  } else {
    j["singularity"] = nullptr;
    j["type"] = nullptr;
  }
  write_json_file(j, path);
}

void write_indicator_csv(const TypeReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# format_version: " << kFormatVersion << "\n";
  out << "t,indicator\n";
  for (const auto& [t, ind] : report.history)
    out << fmt_double(t) << "," << fmt_double(ind) << "\n";
}

void write_psi_csv(const PsiReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# format_version: " << kFormatVersion << "\n";
  out << "t,psi,dpsi_dt,dissipation,margin,refused\n";
  for (const auto& row : report.rows)
    out << fmt_double(row.t) << "," << fmt_double(row.psi) << ","
        << fmt_double(row.dpsi_dt) << "," << fmt_double(row.dissipation) << ","
        << fmt_double(row.margin) << "," << (row.refused ? 1 : 0) << "\n";
}

void save_trace(const FlowTrace& trace, const std::string& dir) {
  fs::create_directories(fs::path(dir) / "snapshots");

  json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["scenario"] = {{"name", trace.scenario.name},
                          {"resolution", trace.scenario.resolution}};
  for (const auto& [k, v] : trace.scenario.params)
    manifest["scenario"]["params"][k] = v;
  manifest["ambient"] = {{"n", trace.initial.n()}};
  if (trace.initial.ambient.periods)
    manifest["ambient"]["periods"] = *trace.initial.ambient.periods;
  else
    manifest["ambient"]["periods"] = nullptr;
  manifest["shape"] = trace.initial.shape;
  manifest["extent"] = trace.initial.extent;
  manifest["periodic_shifts"] = mat_to_json(trace.initial.periodic_shifts);
  manifest["controls"] = {
      {"until", trace.controls.until},
      {"cfl", trace.controls.cfl},
      {"integrator", to_string(trace.controls.integrator)},
      {"scheme", to_string(trace.controls.scheme)},
      {"max_steps", trace.controls.max_steps},
      {"max_A_sq_stop", trace.controls.max_A_sq_stop},
      {"resolution_budget", trace.controls.resolution_budget},
      {"snapshot_stride", trace.controls.snapshot_stride},
      {"max_snapshots", trace.controls.max_snapshots},
      {"redistribute_every", trace.controls.redistribute_every}};
  write_json_file(manifest, (fs::path(dir) / "manifest.json").string());

  write_trace_csv(trace, (fs::path(dir) / "trace.csv").string());
  write_summary_json(trace, (fs::path(dir) / "summary.json").string());
  if (trace.singularity && trace.singularity->reliable) {
    try {
      write_indicator_csv(classify_type(trace),
                          (fs::path(dir) / "indicator.csv").string());
    } catch (const std::exception&) {
    }
  }

  for (size_t i = 0; i < trace.snapshots.size(); ++i) {
    const auto& s = trace.snapshots[i];
    json j;
    j["format_version"] = kFormatVersion;
    j["t"] = s.t;
    j["dt_next"] = s.dt_next;
    j["positions"] = mat_to_json(s.positions);
    j["positions_next"] = mat_to_json(s.positions_next);
    char name[32];
    std::snprintf(name, sizeof name, "snap_%06zu.json", i);
    write_json_file(j, (fs::path(dir) / "snapshots" / name).string());
  }
}

Csv read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  Csv csv;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    size_t pos = 0;
    while (true) {
      const size_t comma = line.find(',', pos);
      cells.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!have_header) {
      csv.columns = cells;
      have_header = true;
      continue;
    }
    if (cells.size() != csv.columns.size())
      throw ConfigError("malformed CSV row in " + path);
    std::vector<double> row;
    for (const auto& cell : cells) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str())
        throw ConfigError("malformed CSV value '" + cell + "' in " + path);
      row.push_back(v);
    }
    csv.rows.push_back(std::move(row));
  }
  if (!have_header || csv.columns.empty())
    throw ConfigError("CSV has no header: " + path);
  return csv;
}

FlowTrace load_trace(const std::string& dir) {
  const json manifest =
      load_json_file((fs::path(dir) / "manifest.json").string());
  FlowTrace trace;
  trace.scenario.name = manifest["scenario"]["name"].get<std::string>();
  trace.scenario.resolution =
      manifest["scenario"]["resolution"].get<std::vector<int>>();
  if (manifest["scenario"].contains("params"))
    for (const auto& [k, v] : manifest["scenario"]["params"].items())
      trace.scenario.params[k] = v.get<double>();

  Immersion& im = trace.initial;
  im.ambient.n = manifest["ambient"]["n"].get<int>();
  if (!manifest["ambient"]["periods"].is_null())
    im.ambient.periods =
        manifest["ambient"]["periods"].get<std::vector<double>>();
  im.shape = manifest["shape"].get<std::vector<int>>();
  im.extent = manifest["extent"].get<std::vector<double>>();
  im.periodic_shifts =
      mat_from_json(manifest["periodic_shifts"], im.n(), im.dim());

  const auto& ct = manifest["controls"];
  trace.controls.until = ct["until"].get<double>();
  trace.controls.cfl = ct["cfl"].get<double>();
  trace.controls.integrator =
      parse_integrator(ct["integrator"].get<std::string>());
  trace.controls.scheme = parse_scheme(ct["scheme"].get<std::string>());
  trace.controls.max_steps = ct["max_steps"].get<long>();
  trace.controls.max_A_sq_stop = ct["max_A_sq_stop"].get<double>();
  trace.controls.resolution_budget = ct["resolution_budget"].get<double>();
  trace.controls.snapshot_stride = ct["snapshot_stride"].get<int>();
  trace.controls.max_snapshots = ct["max_snapshots"].get<int>();
  trace.controls.redistribute_every = ct["redistribute_every"].get<int>();

  // Step log.
  const Csv csv = read_csv((fs::path(dir) / "trace.csv").string());
  for (const auto& row : csv.rows)
    trace.step_log.push_back({row[0], row[1], row[2], row[3], row[4], row[5]});

  // Snapshots, in filename order.
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(fs::path(dir) / "snapshots"))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  long V = 1;
  for (int s : im.shape) V *= s;
  for (const auto& f : files) {
    const json j = load_json_file(f.string());
    Snapshot s;
    s.t = j["t"].get<double>();
    s.dt_next = j["dt_next"].get<double>();
    s.positions = mat_from_json(j["positions"], V, im.dim());
    s.positions_next = mat_from_json(j["positions_next"], V, im.dim());
    trace.snapshots.push_back(std::move(s));
  }
  if (trace.snapshots.empty())
    throw ConfigError("trace directory has no snapshots: " + dir);
  im.positions = trace.snapshots.front().positions;
  im.validate();

  const json summary =
      load_json_file((fs::path(dir) / "summary.json").string());
  trace.termination = summary["termination"] == "reached_time"
                          ? Termination::ReachedTime
                          : Termination::ResolutionExhausted;
  trace.stop_reason = summary.value("stop_reason", "");
  if (!summary["singularity"].is_null()) {
    const auto& s = summary["singularity"];
    SingularityReport rep;
    rep.T = s["estimated_T"].get<double>();
    rep.reliable = s["reliable"].get<bool>();
    rep.fit_residual = s["fit_residual"].get<double>();
    const auto x0 = s["X0"].get<std::vector<double>>();
    const auto x0r = s["X0_refined"].get<std::vector<double>>();
    rep.X0 = Eigen::Map<const VectorXd>(x0.data(), x0.size());
    rep.X0_refined = Eigen::Map<const VectorXd>(x0r.data(), x0r.size());
    rep.note = s.value("note", "");
    trace.singularity = std::move(rep);
  }
  return trace;
}

json cloud_to_json(const RescaledCloud& cloud) {
  json j;
  j["format_version"] = kFormatVersion;
  j["scale_type"] = cloud.scale_type == RescaledCloud::ScaleType::Lambda
                        ? "lambda"
                        : cloud.scale_type ==
                                  RescaledCloud::ScaleType::TimeDependent
                              ? "time_dependent"
                              : "synthetic";
  j["scale"] = cloud.scale;
  j["s"] = cloud.s;
  j["t_source"] = cloud.t_source;
  j["n"] = cloud.n;
  j["count"] = cloud.size();
  j["points"] = mat_to_json(cloud.points);
  j["weights"] = vec_to_json(cloud.weights);
  j["tangent_planes"] = mat_to_json(cloud.frame);
  j["theta"] = vec_to_json(cloud.theta);
  j["A_sq"] = vec_to_json(cloud.A_sq);
  j["grad_cos_norm"] = vec_to_json(cloud.grad_v_norm);
  j["shifts"] = mat_to_json(cloud.shifts);
  return j;
}

void write_cloud_json(const RescaledCloud& cloud, const std::string& path) {
  write_json_file(cloud_to_json(cloud), path);
}

void write_planes_json(const PlaneCluster& cluster,
                       const WitnessReport* witness, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["plane_like"] = cluster.plane_like;
  j["unassigned_fraction"] = cluster.unassigned_fraction;
  j["note"] = cluster.note;
  j["planes"] = json::array();
  for (const auto& p : cluster.planes) {
    j["planes"].push_back({{"basis", mat_to_json(p.basis)},
                           {"multiplicity", p.multiplicity},
                           {"mean_theta", p.mean_theta},
                           {"mean_cos_theta", p.mean_cos_theta},
                           {"fit_residual", p.fit_residual},
                           {"weight_fraction", p.weight_fraction},
                           {"density_ratio", p.density_ratio_raw}});
  }
  if (witness) {
    json w;
    w["found"] = witness->found;
    w["reason"] = witness->reason;
    w["theta0_weight"] = witness->theta0_weight;
    w["max_invariance_residual"] = witness->max_invariance_residual;
    json js = json::array(), jp = json::array();
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 4; ++k) {
        js.push_back(witness->J_star(i, k));
        jp.push_back(witness->J_prime(i, k));
      }
    w["J_star"] = js;
    w["J_prime"] = jp;
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  write_json_file(j, path);
}

void write_decay_csv(const DecayReport& report, double R, double s1, double s2,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# format_version: " << kFormatVersion << "\n";
  out << "# R = " << fmt_double(R) << ", window = [" << fmt_double(s1) << ", "
      << fmt_double(s2) << "]\n";
  out << "lambda,grad_cos_sq,mean_curv_sq,position_perp_sq,covered,snapshots\n";
  for (const auto& row : report.rows)
    out << fmt_double(row.lambda) << "," << fmt_double(row.grad_cos_sq) << ","
        << fmt_double(row.mean_curv_sq) << ","
        << fmt_double(row.position_perp_sq) << ","
        << (row.window_covered ? 1 : 0) << "," << row.snapshots_used << "\n";
}

void write_density_csv(
    const std::vector<std::pair<double, std::vector<double>>>& ratios_per_lambda,
    const std::vector<double>& rhos, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# format_version: " << kFormatVersion << "\n";
  out << "lambda,rho,ratio\n";
  for (const auto& [lambda, ratios] : ratios_per_lambda)
    for (size_t i = 0; i < rhos.size(); ++i)
      out << fmt_double(lambda) << "," << fmt_double(rhos[i]) << ","
          << fmt_double(ratios[i]) << "\n";
}

void write_report_json(const std::vector<CheckResult>& checks,
                       const std::vector<std::string>& suites,
                       const json& config_echo, const std::string& path) {
  json j;
  j["format_version"] = kFormatVersion;
  j["suites"] = suites;
  j["config"] = config_echo;
  int pass = 0, fail = 0, skipped = 0;
  json arr = json::array();
  for (const auto& c : checks) {
    switch (c.status) {
      case CheckResult::Status::Pass:
        ++pass;
        break;
      case CheckResult::Status::Fail:
        ++fail;
        break;
      default:
        ++skipped;
    }
    json e = {{"id", c.id},
              {"scenario", c.scenario},
              {"value", c.value},
              {"bound", c.bound},
              {"margin", c.margin},
              {"status", to_string(c.status)}};
    if (!c.skip_reason.empty()) e["reason"] = c.skip_reason;
    if (!c.provenance.empty()) e["provenance"] = c.provenance;
    arr.push_back(std::move(e));
  }
  j["summary"] = {{"pass", pass}, {"fail", fail}, {"skipped", skipped}};
  j["checks"] = arr;
  write_json_file(j, path);
}

}  // namespace io
}  // namespace lagflow
