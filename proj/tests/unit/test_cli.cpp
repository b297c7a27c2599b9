#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome rotbec(const std::string& args) {
  const std::string cmd = std::string(ROTBEC_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return o;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, got);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Fresh scratch directory per test, removed afterwards.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("rotbec-cli-" + std::string(info->name()) + "-" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  [[nodiscard]] std::string dir(const std::string& name) const { return (root_ / name).string(); }

  fs::path root_;
};

// Small, fast sweep: coarse grid, single start.
const std::string kSmallSweep = "sweep --omega 1 --a-over-astar 0.3,0.4 --n 128 --L 7.5 --no-multistart";

}  // namespace

TEST_F(CliTest, TownesReportsCriticalStrength) {
  const Outcome o = rotbec("townes --out " + dir("t"));
  ASSERT_EQ(o.code, 0);
  const json summary = json::parse(o.out);
  EXPECT_NEAR(summary["a_star"].get<double>(), 11.7009, 1e-3);
  EXPECT_NEAR(summary["grad_sq"].get<double>(), summary["a_star"].get<double>(), 1e-6 * 11.7);

  const json manifest = json::parse(slurp(root_ / "t" / "manifest.json"));
  EXPECT_EQ(manifest["townes"]["a_star"], summary["a_star"]);
  EXPECT_FALSE(manifest["version"].get<std::string>().empty());

  std::istringstream profile(slurp(root_ / "t" / "townes_profile.txt"));
  double r = -1, w = -1;
  ASSERT_TRUE(profile >> r >> w);
  EXPECT_EQ(r, 0.0);
  EXPECT_NEAR(w, summary["w0"].get<double>(), 1e-15);
}

TEST_F(CliTest, ConfigErrorsExitWithTwo) {
  EXPECT_EQ(rotbec("frobnicate").code, 2);
  EXPECT_EQ(rotbec("sweep --out " + dir("x")).code, 2);  // no strength
  EXPECT_EQ(rotbec("sweep --a 1 --a-over-astar 0.5 --out " + dir("x")).code, 2);
  EXPECT_EQ(rotbec("minimize --a 1,2 --out " + dir("x")).code, 2);
  EXPECT_EQ(rotbec("minimize --a 1 --potential cubic:3 --out " + dir("x")).code, 2);
  EXPECT_EQ(rotbec("minimize --a 1 --n 100 --out " + dir("x")).code, 2);

  std::ofstream(root_ / "bad.json") << R"({"command": "townes", "grid": {"points": 64}})";
  EXPECT_EQ(rotbec("--config " + dir("bad.json")).code, 2);
  std::ofstream(root_ / "broken.json") << "{ not json";
  EXPECT_EQ(rotbec("--config " + dir("broken.json")).code, 2);
}

TEST_F(CliTest, GateRefusesNonexistenceRegime) {
  EXPECT_EQ(rotbec("minimize --a-over-astar 1.0 --omega 1 --out " + dir("g")).code, 2);
  EXPECT_EQ(rotbec("minimize --a-over-astar 0.5 --omega 2.5 --out " + dir("g")).code, 2);
  EXPECT_FALSE(fs::exists(root_ / "g" / "sweep.csv"));
  // The override runs the flow; an unconverged point is only fatal in strict mode.
  const std::string unsafe = "minimize --a-over-astar 1.05 --omega 1 --n 128 --L 7.5 --max-steps 5 --unsafe-nonexistence-scan";
  EXPECT_EQ(rotbec(unsafe + " --out " + dir("u")).code, 0);
  EXPECT_EQ(rotbec(unsafe + " --strict --out " + dir("v")).code, 3);
}

TEST_F(CliTest, BoundaryMassGateExitsWithFour) {
  // The oscillator ground state on a box of half width 3 leaves ~1e-4 of its
  // mass in the outer strip.
  EXPECT_EQ(rotbec("minimize --a 0 --n 64 --L 3 --solve-scale 1 --out " + dir("b")).code, 4);
}

TEST_F(CliTest, ManifestRecordsResolvedDefaults) {
  ASSERT_EQ(rotbec("minimize --a-over-astar 0.3 --omega 1 --n 128 --L 7.5 --out " + dir("m")).code, 0);
  const json m = json::parse(slurp(root_ / "m" / "manifest.json"));
  EXPECT_EQ(m["config"]["minimize"]["dt"].get<double>(), 5e-3);
  EXPECT_EQ(m["config"]["minimize"]["tol"].get<double>(), 1e-9);
  EXPECT_EQ(m["config"]["grid"]["n"].get<int>(), 128);
  EXPECT_EQ(m["trap"]["omega_star"].get<double>(), 2.0);
  EXPECT_EQ(m["trap"]["gamma"].get<double>(), 2.0);
  EXPECT_NEAR(m["trap"]["lambda"].get<double>(), std::pow(m["townes"]["m2"].get<double>(), 0.25), 1e-12);
  EXPECT_EQ(m["snapshots"].size(), 1u);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  std::ofstream(root_ / "run.json") << R"({"command": "minimize", "grid": {"n": 128, "L": 7.5},
    "problem": {"a": 2.0, "omega": 0.5, "potential": "power:2"}, "seed": 18446744073709551615})";
  ASSERT_EQ(rotbec("--config " + dir("run.json") + " --omega 1 --a-over-astar 0.3 --out " + dir("o")).code, 0);
  const json m = json::parse(slurp(root_ / "o" / "manifest.json"));
  EXPECT_EQ(m["config"]["problem"]["omega"].get<double>(), 1.0);
  EXPECT_FALSE(m["config"]["problem"].contains("a"));
  EXPECT_EQ(m["config"]["problem"]["a_over_astar"][0].get<double>(), 0.3);
  EXPECT_EQ(m["config"]["seed"].get<std::uint64_t>(), 18446744073709551615ULL);
}

TEST_F(CliTest, SweepIsDeterministic) {
  ASSERT_EQ(rotbec(kSmallSweep + " --init random --seed 5 --out " + dir("a")).code, 0);
  ASSERT_EQ(rotbec(kSmallSweep + " --init random --seed 5 --out " + dir("b")).code, 0);
  const std::string csv = slurp(root_ / "a" / "sweep.csv");
  EXPECT_EQ(csv, slurp(root_ / "b" / "sweep.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "a,a_over_astar,omega,potential_tag,n,L,eps_a,x_a_x,x_a_y,mu,total,kinetic,potential,interaction,"
            "rotation,covariant_kinetic,veff,residual,steps,converged");
  const json ma = json::parse(slurp(root_ / "a" / "manifest.json"));
  const json mb = json::parse(slurp(root_ / "b" / "manifest.json"));
  EXPECT_EQ(ma["snapshots"], mb["snapshots"]);
}

TEST_F(CliTest, InterruptedSweepResumes) {
  ASSERT_EQ(rotbec(kSmallSweep + " --out " + dir("r")).code, 0);
  const std::string full = slurp(root_ / "r" / "sweep.csv");
  const json m = json::parse(slurp(root_ / "r" / "manifest.json"));
  const std::string hash = m["config_hash"];

  // Simulate an interruption after the first point.
  fs::remove(root_ / "r" / ("snap-" + hash + "-1.json"));
  fs::remove(root_ / "r" / ("snap-" + hash + "-1.rbec"));
  fs::remove(root_ / "r" / "sweep.csv");
  const Outcome again = rotbec(kSmallSweep + " --out " + dir("r"));
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(json::parse(again.out)["resumed"].get<int>(), 1);
  EXPECT_EQ(slurp(root_ / "r" / "sweep.csv"), full);

  // A different configuration does not pick up the stored points.
  const Outcome other = rotbec(kSmallSweep + " --dt 4e-3 --out " + dir("r"));
  ASSERT_EQ(other.code, 0);
  EXPECT_EQ(json::parse(other.out)["resumed"].get<int>(), 0);
}

TEST_F(CliTest, AnalyzeNeedsStoredPoints) {
  EXPECT_EQ(rotbec("analyze --omega 1 --a-over-astar 0.3,0.4 --n 128 --L 7.5 --no-multistart --out " + dir("e")).code, 2);
  ASSERT_EQ(rotbec(kSmallSweep + " --out " + dir("s")).code, 0);
  const Outcome o = rotbec("analyze --omega 1 --a-over-astar 0.3,0.4 --n 128 --L 7.5 --no-multistart --out " + dir("s"));
  ASSERT_EQ(o.code, 0);
  const json report = json::parse(slurp(root_ / "s" / "report.json"));
  // Two points are too few for a fit; the report says so instead of failing.
  EXPECT_TRUE(report["energy_fit"].contains("unavailable"));
  EXPECT_EQ(report["mu_limit"]["rows"].size(), 2u);
  EXPECT_TRUE(fs::exists(root_ / "s" / "loglog.csv"));
  EXPECT_TRUE(fs::exists(root_ / "s" / "observables.csv"));
}

TEST_F(CliTest, TrialScanAboveCriticalStrength) {
  const Outcome o = rotbec("trial-scan --a-over-astar 1.1 --omega 1 --out " + dir("ts"));
  ASSERT_EQ(o.code, 0);
  const json s = json::parse(o.out);
  EXPECT_LT(s["slope"].get<double>(), 0.0);
  EXPECT_NEAR(s["slope"].get<double>(), s["reference_slope"].get<double>(), 0.1 * std::abs(s["reference_slope"].get<double>()));
  EXPECT_TRUE(fs::exists(root_ / "ts" / "trial_scan.csv"));
}

TEST_F(CliTest, SpectrumWritesEigenpairs) {
  const Outcome o = rotbec("spectrum --operator L --sector 0 --count 2 --out " + dir("sp"));
  ASSERT_EQ(o.code, 0);
  const json s = json::parse(o.out);
  EXPECT_LT(std::abs(s["eigenvalues"][0].get<double>()), 1e-3);
  EXPECT_GT(s["profile_cosine"].get<double>(), 0.9999);
}
