// Exercises the shared-library surface exactly as an external consumer
// would: opaque handles, status codes, thread-local error strings.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "lagflow/lagflow.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lagflow_capi_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& leaf = "") const {
    return (leaf.empty() ? path : path / leaf).string();
  }
};

}  // namespace

TEST_CASE("api version and error surface") {
  CHECK(lf_api_version() == LAGFLOW_API_VERSION);
  lf_immersion* im = nullptr;
  CHECK(lf_scenario_build("{\"name\": \"warp\", \"resolution\": 16}", &im) ==
        LF_ERR_USAGE);
  CHECK(std::strlen(lf_last_error()) > 0);
  CHECK(lf_scenario_build("not json", &im) == LF_ERR_USAGE);
  CHECK(lf_scenario_build(nullptr, &im) == LF_ERR_USAGE);
}

TEST_CASE("scenario handles, geometry scalars, residuals") {
  lf_immersion* im = nullptr;
  REQUIRE(lf_scenario_build(
              "{\"name\": \"clifford_torus\", \"r0\": 1.0, \"resolution\": 16}",
              &im) == LF_OK);
  int n = 0, V = 0;
  CHECK(lf_immersion_info(im, &n, &V) == LF_OK);
  CHECK(n == 2);
  CHECK(V == 256);

  double res = -1;
  CHECK(lf_lagrangian_residual(im, &res) == LF_OK);
  CHECK(res < 1e-12);

  lf_geometry* geo = nullptr;
  REQUIRE(lf_geometry_compute(im, &geo) == LF_OK);
  double v = 0;
  CHECK(lf_geometry_scalar(geo, "max_A_sq", &v) == LF_OK);
  CHECK(v == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(lf_geometry_scalar(geo, "volume", &v) == LF_OK);
  CHECK(v == doctest::Approx(4 * 3.14159265358979 * 3.14159265358979)
                 .epsilon(1e-2));
  CHECK(lf_geometry_scalar(geo, "nonsense", &v) == LF_ERR_USAGE);
  lf_geometry_free(geo);
  lf_immersion_free(im);
}

TEST_CASE("flow run, summary, save/load, kernel evaluations") {
  lf_immersion* im = nullptr;
  REQUIRE(lf_scenario_build(
              "{\"name\": \"circle\", \"r0\": 1.0, \"resolution\": 64}", &im) ==
          LF_OK);
  lf_trace* trace = nullptr;
  REQUIRE(lf_flow_run(im, "{\"until\": \"singularity\"}", &trace) == LF_OK);

  char* summary = nullptr;
  REQUIRE(lf_trace_summary(trace, &summary) == LF_OK);
  const std::string s = summary;
  lf_string_free(summary);
  CHECK(s.find("resolution_exhausted") != std::string::npos);
  CHECK(s.find("estimated_T") != std::string::npos);

  int snaps = 0;
  CHECK(lf_trace_snapshot_count(trace, &snaps) == LF_OK);
  CHECK(snaps > 10);

  // Gaussian density at the singular spacetime point (t0 <= 0 -> T).
  const double center[2] = {0.0, 0.0};
  double phi = 0;
  CHECK(lf_gaussian_density(trace, snaps - 1, center, -1.0, -1.0, &phi) ==
        LF_OK);
  CHECK(phi == doctest::Approx(std::sqrt(2 * 3.14159265358979 / std::exp(1.0)))
                   .epsilon(0.02));

  // Psi refuses on the circle: the hypothesis boundary.
  double psi = 0;
  CHECK(lf_weighted_psi(trace, snaps - 1, center, -1.0, -1.0, &psi) ==
        LF_ERR_HYPOTHESIS);
  CHECK(std::string(lf_last_error()).find("cos(theta)") != std::string::npos);

  TempDir tmp;
  CHECK(lf_trace_save(trace, tmp.str("tr").c_str()) == LF_OK);
  lf_trace* loaded = nullptr;
  REQUIRE(lf_trace_load(tmp.str("tr").c_str(), &loaded) == LF_OK);
  double phi2 = 0;
  CHECK(lf_gaussian_density(loaded, snaps - 1, center, -1.0, -1.0, &phi2) ==
        LF_OK);
  CHECK(phi2 == phi);  // serialized positions round-trip exactly
  lf_trace_free(loaded);
  lf_trace_free(trace);
  lf_immersion_free(im);
}

TEST_CASE("command-level entry points and exit codes") {
  TempDir tmp;
  CHECK(lf_cmd_verify("warp", nullptr, tmp.str("r.json").c_str()) == 2);
  CHECK(lf_cmd_plot(tmp.str("missing.csv").c_str(), "timeseries") == 2);
  {
    std::ofstream out(tmp.str("run.json"));
    out << "{\"scenario\": {\"name\": \"circle\", \"r0\": 1.0, "
           "\"resolution\": 16}, \"controls\": {\"until\": 0.01}}\n";
  }
  CHECK(lf_cmd_run(tmp.str("run.json").c_str(), tmp.str("out").c_str()) == 0);
  CHECK(lf_cmd_blowup(tmp.str("out").c_str(), nullptr) == 4);
}
