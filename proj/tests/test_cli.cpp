#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "sts/runner.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "sts_cli_tests";

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " STS_CLI_PATH " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_scenario(const std::string& name, const std::string& text) {
  fs::create_directories(work);
  const fs::path p = work / (name + ".ini");
  std::ofstream(p) << text;
  return p;
}

std::string value(const sts::Report& r, const std::string& key) {
  for (const auto& [k, v] : r) {
    if (k == key) return v;
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* small_grid = R"(
[time]
t0 = -2
dt = 0.125
n = 64
[energy]
eps0 = 0.5
[space]
x_min = 0
x_max = 2
points = 9
)";

}  // namespace

TEST(Cli, OracleCompareReportsPass) {
  const auto p = write_scenario("oc", R"(
[time]
t0 = -8
dt = 0.125
n = 256
[energy]
eps0 = 0.2
[space]
x_min = -2
x_max = 4
points = 16
anchor = 5
[spectrum]
family = momentum-gaussian
p0 = 5
sigma_p = 0.5
[run]
mode = oracle-compare
)");
  const fs::path out = work / "oc_out";
  EXPECT_EQ(run_cli("--output " + out.string() + " run " + p.string()), 0);
  const auto r = sts::read_report(out.string());
  EXPECT_EQ(value(r, "status"), "ok");
  EXPECT_EQ(value(r, "check_oracle_rel_l2"), "pass");
  EXPECT_LT(std::stod(value(r, "oracle_rel_l2")), 1e-6);
  EXPECT_TRUE(fs::exists(out / "field.csv"));
  EXPECT_TRUE(fs::exists(out / "density.csv"));
  EXPECT_EQ(run_cli("report " + out.string()), 0);
}

TEST(Cli, ConstantGaugeIsRoundOff) {
  const auto p = write_scenario("gc", std::string(small_grid) + R"(
[spectrum]
family = gaussian
center = 5
width = 1
[em]
phi0 = 0.2
[gauge]
f0 = 0.7
[run]
mode = gauge-check
)");
  const fs::path out = work / "gc_out";
  EXPECT_EQ(run_cli("--output " + out.string() + " run " + p.string()), 0);
  const auto r = sts::read_report(out.string());
  EXPECT_LT(std::stod(value(r, "gauge_density")), 1e-12);
  EXPECT_LT(std::stod(value(r, "gauge_covariance")), 1e-12);
}

TEST(Cli, StrictForbiddenExitsNumericalAndNamesCell) {
  const auto p = write_scenario("strict", R"(
[time]
t0 = -10
dt = 0.15625
n = 256
[energy]
eps0 = 0.5
[space]
x_min = 0
x_max = 12
points = 49
[spectrum]
family = gaussian
component = minus
center = 3
width = 0.3
[potential]
family = step
v0 = 5
x_s = 1
)");
  const fs::path out = work / "strict_out";
  EXPECT_EQ(run_cli("--strict-forbidden --output " + out.string() + " run " + p.string()), 2);
  const auto r = sts::read_report(out.string());
  EXPECT_EQ(value(r, "status"), "fail");
  EXPECT_EQ(value(r, "error_kind"), "overflow");
  EXPECT_FALSE(value(r, "overflow_x_index").empty());
  EXPECT_FALSE(value(r, "overflow_energy_index").empty());
  EXPECT_GT(std::stod(value(r, "overflow_x")), 1.0);
  EXPECT_LT(std::stod(value(r, "overflow_energy")), 5.0);
  // Clamp mode finishes the same scenario.
  EXPECT_EQ(run_cli("--output " + (work / "clamp_out").string() + " run " + p.string()), 0);
}

TEST(Cli, DeterministicArtifacts) {
  const auto p = write_scenario("det", std::string(small_grid) + R"(
[spectrum]
family = gaussian
center = 4
width = 0.5
[potential]
family = linear
slope = 0.5
)");
  for (const char* threads : {"1", "3"}) {
    const fs::path a = work / (std::string("det_a_") + threads);
    const fs::path b = work / (std::string("det_b_") + threads);
    ASSERT_EQ(run_cli(std::string("--threads ") + threads + " --output " + a.string() + " run " + p.string()), 0);
    ASSERT_EQ(run_cli(std::string("--threads ") + threads + " --output " + b.string() + " run " + p.string()), 0);
    for (const char* f : {"field.csv", "density.csv", "report.csv"}) {
      EXPECT_EQ(slurp(a / f), slurp(b / f)) << f << " threads " << threads;
    }
  }
}

TEST(Cli, ValidateExitCodes) {
  EXPECT_EQ(run_cli("validate " + write_scenario("ok", small_grid).string()), 0);
  EXPECT_EQ(run_cli("validate " + write_scenario("bad", "[time]\ndtt = 1\n").string()), 1);
  EXPECT_EQ(run_cli("validate " + (work / "missing.ini").string()), 1);
  EXPECT_EQ(run_cli("--tolerance-scale -1 validate " + write_scenario("ok2", small_grid).string()), 1);
  EXPECT_EQ(run_cli("run " + write_scenario("bad2", "[run]\nmode = gauge-check\n").string()), 1);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto p = write_scenario("env", std::string(small_grid) + "[spectrum]\nfamily = gaussian\ncenter = 4\n");
  const fs::path out = work / "env_out";
  fs::remove_all(out);
  EXPECT_EQ(run_cli("run " + p.string(), "STS_OUTPUT_DIR=" + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "report.csv"));
}

TEST(Cli, ToleranceScaleFlipsCheck) {
  const auto p = write_scenario("norm", std::string(small_grid) + R"(
[spectrum]
family = gaussian
center = 5
width = 1
[tolerances]
normalization = 1e-8
)");
  const fs::path out = work / "norm_out";
  ASSERT_EQ(run_cli("--output " + out.string() + " run " + p.string()), 0);
  const double err = std::stod(value(sts::read_report(out.string()), "normalization"));
  // A scale that puts the threshold below the measured error turns the run into a failed check.
  if (err > 0.0) {
    const double scale = 0.5 * err / 1e-8;
    std::ostringstream s;
    s.precision(17);
    s << scale;
    EXPECT_EQ(run_cli("--tolerance-scale " + s.str() + " --output " + out.string() + " run " + p.string()), 2);
    EXPECT_EQ(value(sts::read_report(out.string()), "status"), "fail");
  }
}
