// lagflow command-line front end. Thin argv layer over the shared-library
// C API; all computation and file formats live behind liblagflow.
#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "lagflow/lagflow.h"

int main(int argc, char** argv) {
  CLI::App app{"lagflow: Lagrangian mean curvature flow laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       "lagflow api " + std::to_string(lf_api_version()));

  // run
  std::string run_config, run_out = "out";
  CLI::App* run = app.add_subcommand("run", "run a flow from a config file");
  run->add_option("--config", run_config, "run config JSON")->required();
  run->add_option("--out", run_out, "output directory");

  // blowup
  std::string blow_dir;
  int lambda_max = 3;
  std::uint64_t blow_seed = 12345;
  double blow_R = 1.0, blow_s1 = -0.5, blow_s2 = -0.1;
  CLI::App* blow = app.add_subcommand(
      "blowup", "tangent-cone analysis of a recorded trace");
  blow->add_option("trace_dir", blow_dir, "trace directory from `run`")
      ->required();
  blow->add_option("--lambda-max", lambda_max, "largest dyadic exponent K");
  blow->add_option("--seed", blow_seed, "RNG seed for plane fitting");
  blow->add_option("--R", blow_R, "ball radius");
  blow->add_option("--s1", blow_s1, "decay window start (rescaled time)");
  blow->add_option("--s2", blow_s2, "decay window end (rescaled time)");

  // verify
  std::vector<std::string> suites;
  std::string verify_config, verify_out = "report.json";
  CLI::App* verify =
      app.add_subcommand("verify", "run the named verification suites");
  verify->add_option("--suite", suites,
                     "suite name (repeatable; default: all)");
  verify->add_option("--config", verify_config, "tolerance/config overrides");
  verify->add_option("--out", verify_out, "report path");

  // plot
  std::string plot_csv, plot_kind;
  CLI::App* plot = app.add_subcommand("plot", "render a CSV as SVG");
  plot->add_option("csv", plot_csv, "input CSV")->required();
  plot->add_option("kind", plot_kind,
                   "timeseries | density_ratio | type_indicator | psi")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) return lf_cmd_run(run_config.c_str(), run_out.c_str());

  if (blow->parsed()) {
    char params[256];
    std::snprintf(params, sizeof params,
                  "{\"lambda_max\": %d, \"seed\": %llu, \"R\": %.17g, "
                  "\"s1\": %.17g, \"s2\": %.17g}",
                  lambda_max, static_cast<unsigned long long>(blow_seed),
                  blow_R, blow_s1, blow_s2);
    return lf_cmd_blowup(blow_dir.c_str(), params);
  }

  if (verify->parsed()) {
    std::string csv;
    for (size_t i = 0; i < suites.size(); ++i) {
      if (i) csv += ",";
      csv += suites[i];
    }
    return lf_cmd_verify(csv.c_str(),
                         verify_config.empty() ? nullptr : verify_config.c_str(),
                         verify_out.c_str());
  }

  if (plot->parsed()) return lf_cmd_plot(plot_csv.c_str(), plot_kind.c_str());

  return 2;
}
