#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "types.hpp"

namespace lagflow {

struct CheckResult {
  std::string id;
  std::string scenario;
  double value = 0.0;
  double bound = 0.0;
  // bound - value for upper bounds, value - bound for lower bounds,
  // distance to the nearer edge for ranges. Pass iff margin >= 0.
  double margin = 0.0;
  enum class Status { Pass, Fail, Skipped } status = Status::Fail;
  std::string skip_reason;
  std::string provenance;
};

const char* to_string(CheckResult::Status s);

// Tolerances default to the values pinned per operation; a config file may
// override any bound by check id (see configs/tolerances.json, which lists
// every default explicitly).
struct VerifyConfig {
  std::uint64_t seed = 12345;
  int threads = 0;  // 0: LAGFLOW_THREADS, else hardware concurrency
  // Reference resolutions.
  int circle_N = 256;
  int clifford_N = 64;
  int graph_N = 32;
  bool quick = false;  // shrink the reference runs (smoke/unit testing)
  std::map<std::string, double> bound_overrides;

  static VerifyConfig from_json(const std::string& path);
  std::string canonical_key() const;
};

const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

// Runs one suite; results sorted by check id. Unknown suite names throw
// ConfigError. Checks execute on a small worker pool (capped by
// LAGFLOW_THREADS); heavyweight flow traces are computed once and shared.
std::vector<CheckResult> run_suite(const std::string& name,
                                   const VerifyConfig& cfg);
std::vector<CheckResult> run_suites(const std::vector<std::string>& names,
                                    const VerifyConfig& cfg);

bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace lagflow
