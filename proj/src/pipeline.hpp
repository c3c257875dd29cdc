#pragma once

#include <string>
#include <vector>

namespace lagflow {
namespace pipeline {

// Exit-code contract (fixed for CI use):
//   0 ok, 1 check failure, 2 usage/config error, 3 numerical failure,
//   4 missing prerequisite.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitMissingPrereq = 4;

int cmd_run(const std::string& config_path, const std::string& out_dir);
int cmd_blowup(const std::string& trace_dir, const std::string& params_json);
int cmd_verify(const std::vector<std::string>& suites,
               const std::string& config_path_or_empty,
               const std::string& out_path);
int cmd_plot(const std::string& csv_path, const std::string& kind);

}  // namespace pipeline
}  // namespace lagflow
