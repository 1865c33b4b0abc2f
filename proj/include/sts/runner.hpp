#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sts/scenario.hpp"

namespace sts {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_numerical = 2 };

struct RunOptions {
  std::optional<unsigned> threads;  // overrides run.threads
  bool strict_forbidden = false;    // overrides run.forbidden
  double tolerance_scale = 1.0;     // multiplies every tolerance
  std::string output_dir;           // required
};

/// Ordered key/value report, written as report.csv.
using Report = std::vector<std::pair<std::string, std::string>>;

struct RunResult {
  int exit_code = exit_ok;
  Report report;
  std::vector<std::string> warnings;
};

/// Executes the scenario's run mode and writes field.csv, density.csv (when a
/// field was produced) and report.csv into options.output_dir. Never throws
/// for scenario-level failures: they become exit codes and report entries.
RunResult run(const Scenario& scenario, const RunOptions& options);

/// Reads a report.csv written by run().
Report read_report(const std::string& artifact_dir);

/// Numbers in artifacts: 17 significant digits.
std::string format_number(double v);

}  // namespace sts
