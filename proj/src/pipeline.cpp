#include "pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "io.hpp"
#include "svg.hpp"

namespace lagflow {
namespace pipeline {

namespace fs = std::filesystem;

namespace {

int map_exception(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  if (dynamic_cast<const MissingPrereqError*>(&e)) return kExitMissingPrereq;
  if (dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
  if (dynamic_cast<const HypothesisError*>(&e)) return kExitMissingPrereq;
  return kExitNumerical;
}

}  // namespace

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  try {
    const io::RunConfig cfg = io::load_run_config(config_path);
    const Immersion im = build_scenario(cfg.scenario);
    const FlowTrace trace = run(im, cfg.controls, cfg.scenario);

    fs::create_directories(out_dir);
    io::save_trace(trace, out_dir);

    // Psi series for each configured kernel that resolves.
    for (size_t k = 0; k < cfg.kernels.size(); ++k) {
      try {
        const KernelSpec spec = cfg.kernels[k].resolve(trace);
        const PsiReport rep = psi_monotonicity_report(trace, spec);
        char name[32];
        std::snprintf(name, sizeof name, "psi_%zu.csv", k);
        io::write_psi_csv(rep, (fs::path(out_dir) / name).string());
      } catch (const MissingPrereqError& e) {
        std::cerr << "kernel " << k << " skipped: " << e.what() << "\n";
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}

int cmd_blowup(const std::string& trace_dir, const std::string& params_json) {
  try {
    io::json params = io::json::object();
    if (!params_json.empty()) {
      try {
        params = io::json::parse(params_json);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid blowup params JSON: ") +
                          e.what());
      }
    }
    const FlowTrace trace = io::load_trace(trace_dir);
    if (!trace.singularity)
      throw MissingPrereqError("trace has no singularity report");

    const double R = params.value("R", 1.0);
    const double s1 = params.value("s1", -0.5);
    const double s2 = params.value("s2", -0.1);
    const double t_lambda = params.value("t_lambda", -0.25);
    const std::uint64_t seed = params.value("seed", 12345);
    int kmax = params.value("lambda_max", 3);
    kmax = std::min(kmax, max_dyadic_exponent(trace, R, 0.3));

    const fs::path out = fs::path(trace_dir) / "blowup";
    fs::create_directories(out);

    std::vector<double> lambdas;
    std::vector<std::pair<double, std::vector<double>>> density_rows;
    const std::vector<double> rhos = {0.25 * R, 0.5 * R, 0.75 * R, R};
    RescaledCloud finest;
    for (int k = 0; k <= kmax; ++k) {
      const double lam = std::pow(2.0, k);
      lambdas.push_back(lam);
      RescaledCloud cloud = lambda_rescale(trace, lam, t_lambda);
      char name[32];
      std::snprintf(name, sizeof name, "lambda_%d.json", k);
      io::write_cloud_json(cloud, (out / name).string());
      // Density ratios about the cloud point nearest the blow-up center; for
      // cone-like limits this sits at the origin, for round shrinkers on the
      // submanifold.
      int nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int v = 0; v < cloud.size(); ++v) {
        const double d = cloud.points.row(v).norm();
        if (d < best) {
          best = d;
          nearest = v;
        }
      }
      const VectorXd xi = cloud.points.row(nearest);
      density_rows.emplace_back(lam, density_ratio(cloud, xi, rhos));
      finest = std::move(cloud);
    }

    FitParams fit_params;
    fit_params.seed = seed;
    fit_params.ball_radius = R;
    const PlaneCluster cluster = fit_planes(finest, fit_params);
    WitnessReport witness;
    if (trace.n() == 2) witness = complex_structure_witness(cluster);
    io::write_planes_json(cluster, trace.n() == 2 ? &witness : nullptr,
                          (out / "planes.json").string());

    // Isoperimetric statistic on the finest rescaled snapshot (report only).
    {
      Immersion rim = trace.initial;
      rim.positions = finest.points;
      rim.periodic_shifts = finest.shifts;
      GeometryCache rgeo;
      compute_geometry(rim, trace.controls.scheme, rgeo);
      int center = 0;
      rgeo.norm_A_sq.maxCoeff(&center);
      const auto rows = intrinsic_ball_report(rim, rgeo, center,
                                              {0.25 * R, 0.5 * R, R});
      std::ofstream iso((out / "isoperimetric.csv").string());
      iso << "# format_version: 1\nrho,area_over_rho_n\n";
      for (const auto& row : rows)
        iso << row.rho << "," << row.area_ratio << "\n";
    }

    const DecayReport decay = integral_decay_report(trace, lambdas, R, s1, s2);
    io::write_decay_csv(decay, R, s1, s2, (out / "decay.csv").string());
    io::write_density_csv(density_rows, rhos, (out / "density.csv").string());
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}

int cmd_verify(const std::vector<std::string>& suites,
               const std::string& config_path_or_empty,
               const std::string& out_path) {
  try {
    VerifyConfig cfg;
    if (!config_path_or_empty.empty())
      cfg = VerifyConfig::from_json(config_path_or_empty);
    std::vector<std::string> names = suites;
    if (names.empty()) names = suite_names();
    for (const auto& n : names)
      if (!is_suite(n)) throw ConfigError("unknown suite: " + n);

    const std::vector<CheckResult> checks = run_suites(names, cfg);

    io::json echo;
    echo["seed"] = cfg.seed;
    echo["quick"] = cfg.quick;
    echo["resolutions"] = {{"circle", cfg.circle_N},
                           {"clifford", cfg.clifford_N},
                           {"graph", cfg.graph_N}};
    for (const auto& [k, v] : cfg.bound_overrides)
      echo["bound_overrides"][k] = v;
    io::write_report_json(checks, names, echo, out_path);

    for (const auto& c : checks)
      std::printf("%-7s %-48s value=%.6g bound=%.6g\n", to_string(c.status),
                  c.id.c_str(), c.value, c.bound);
    return all_passed(checks) ? kExitOk : kExitCheckFailed;
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}

int cmd_plot(const std::string& csv_path, const std::string& kind) {
  try {
    const io::Csv csv = io::read_csv(csv_path);
    if (csv.rows.empty()) throw ConfigError("CSV has no data rows");
    const std::string out = csv_path + ".svg";

    auto col = [&](const std::string& name) -> int {
      for (size_t i = 0; i < csv.columns.size(); ++i)
        if (csv.columns[i] == name) return static_cast<int>(i);
      return -1;
    };
    // Plot-only decimation; long step logs produce unwieldy polylines.
    const size_t stride = std::max<size_t>(1, csv.rows.size() / 2000);
    auto column = [&](int idx) {
      std::vector<double> v;
      for (size_t i = 0; i < csv.rows.size(); i += stride)
        v.push_back(csv.rows[i][idx]);
      if ((csv.rows.size() - 1) % stride != 0)
        v.push_back(csv.rows.back()[idx]);
      return v;
    };

    if (kind == "timeseries") {
      std::vector<svg::Series> series;
      const std::vector<double> t = column(0);
      for (size_t cidx = 1; cidx < csv.columns.size(); ++cidx)
        series.push_back({csv.columns[cidx], t, column(cidx)});
      svg::line_plot(out, fs::path(csv_path).filename().string(),
                     csv.columns[0], "value", series);
    } else if (kind == "type_indicator") {
      const int ti = col("t"), ii = col("indicator");
      if (ti < 0 || ii < 0)
        throw ConfigError("type_indicator plot needs columns t, indicator");
      svg::line_plot(out, "(T - t) max|A|^2", "t", "indicator",
                     {{"indicator", column(ti), column(ii)}});
    } else if (kind == "psi") {
      const int ti = col("t"), pi = col("psi");
      if (ti < 0 || pi < 0) throw ConfigError("psi plot needs columns t, psi");
      svg::line_plot(out, "weighted monotonicity functional", "t", "Psi",
                     {{"Psi", column(ti), column(pi)}});
    } else if (kind == "density_ratio") {
      const int li = col("lambda"), ri = col("rho"), vi = col("ratio");
      if (li < 0 || ri < 0 || vi < 0)
        throw ConfigError("density_ratio plot needs columns lambda, rho, ratio");
      std::vector<svg::Series> series;
      for (const auto& row : csv.rows) {
        const double lam = row[li];
        svg::Series* s = nullptr;
        for (auto& existing : series)
          if (existing.label == "lambda=" + std::to_string(lam)) s = &existing;
        if (!s) {
          series.push_back({"lambda=" + std::to_string(lam), {}, {}});
          s = &series.back();
        }
        s->x.push_back(row[ri]);
        s->y.push_back(row[vi]);
      }
      svg::line_plot(out, "density ratios", "rho", "ratio", series);
    } else {
      throw ConfigError("unknown plot kind: " + kind);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}

}  // namespace pipeline
}  // namespace lagflow
