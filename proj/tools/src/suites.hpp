#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace hjb::cli {

struct SuiteResult {
  std::string suite;
  bool pass = false;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> witnesses;
  double seconds = 0.0;
};

SuiteResult cmd_verify_duality(const RunConfig& config);
SuiteResult cmd_verify_solutions(const RunConfig& config);
SuiteResult cmd_demo_nonuniqueness(const RunConfig& config);
SuiteResult cmd_solve_dp(const RunConfig& config);
SuiteResult cmd_probe(const RunConfig& config);
SuiteResult cmd_approx_sequence(const RunConfig& config);
SuiteResult cmd_export_field(const RunConfig& config);

// Writes <out_dir>/<suite>.json ({suite, pass, witnesses, seconds}) and echoes
// a one-line summary to stdout.
void write_summary(const SuiteResult& result, const std::string& out_dir);

}  // namespace hjb::cli
