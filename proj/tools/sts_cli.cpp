// sts: run, validate and inspect space-conditional propagation scenarios.
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sts/runner.hpp"
#include "sts/scenario.hpp"

namespace {

std::string default_output_dir() {
  if (const char* env = std::getenv("STS_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "sts_output";
}

int print_problems(const sts::ValidationError& e) {
  std::cerr << "invalid scenario: " << e.what() << '\n';
  return sts::exit_validation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-conditional wave function propagation and checks"};
  app.require_subcommand(1);

  unsigned threads = 0;
  bool strict = false;
  double tolerance_scale = 1.0;
  std::string output;
  app.add_option("--threads", threads, "Worker threads (overrides run.threads)")->check(CLI::PositiveNumber);
  app.add_flag("--strict-forbidden", strict, "Abort on evanescent growth beyond the cap instead of clamping");
  app.add_option("--tolerance-scale", tolerance_scale, "Multiply every pass/fail tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", output, "Artifact directory (default: run.output, $STS_OUTPUT_DIR, ./sts_output)");

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Run a scenario and write CSV artifacts");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->fallthrough();
  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario without running it");
  validate->add_option("scenario", scenario_path, "Scenario file")->required();
  validate->fallthrough();
  std::string artifact_dir;
  auto* report = app.add_subcommand("report", "Print the report of a finished run");
  report->add_option("artifact_dir", artifact_dir, "Directory holding report.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sts::exit_validation;
  }

  try {
    if (*report) {
      const auto entries = sts::read_report(artifact_dir);
      std::size_t width = 0;
      for (const auto& [k, v] : entries) width = std::max(width, k.size());
      for (const auto& [k, v] : entries) fmt::print("{:<{}}  {}\n", k, width, v);
      for (const auto& [k, v] : entries) {
        if (k == "exit_code") return std::stoi(v);
      }
      return sts::exit_ok;
    }

    const sts::Scenario scenario = sts::load_scenario(scenario_path);
    if (*validate) {
      fmt::print("{}: ok ({} mode, {} time samples, {} positions)\n", scenario_path, sts::to_string(scenario.mode),
                 scenario.tgrid.size(), scenario.xgrid.size());
      return sts::exit_ok;
    }

    sts::RunOptions opts;
    if (threads > 0) opts.threads = threads;
    opts.strict_forbidden = strict;
    opts.tolerance_scale = tolerance_scale;
    opts.output_dir = !output.empty() ? output : !scenario.output.empty() ? scenario.output : default_output_dir();
    const auto result = sts::run(scenario, opts);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& [k, v] : result.report) {
      if (k == "status" || k == "error" || k.rfind("check_", 0) == 0) fmt::print("{}: {}\n", k, v);
    }
    fmt::print("artifacts: {}\n", opts.output_dir);
    return result.exit_code;
  } catch (const sts::ValidationError& e) {
    return print_problems(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sts::exit_validation;
  }
}
