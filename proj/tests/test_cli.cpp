#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "fleetsample/io.hpp"

namespace fs = std::filesystem;
using namespace fleetsample;

namespace {

const fs::path kScenarios = FLEETSAMPLE_SCENARIO_DIR;

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + FLEETSAMPLE_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("fleetsample_cli_" + std::string(
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& body) {
    write_text_file(dir_ / name, body);
    return (dir_ / name).string();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, RunWritesMetricsAndSummary) {
  EXPECT_EQ(cli("run --scenario " + (kScenarios / "minimal.json").string() + " --policy greedy --out-dir " +
                dir_.string()),
            0);
  const auto rows = parse_metrics_csv(read_text_file(dir_ / "greedy" / "metrics.csv"));
  EXPECT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows.back().policy, "greedy");
  EXPECT_TRUE(fs::exists(dir_ / "summary.json"));
}

TEST_F(Cli, FlagsOverrideConfig) {
  EXPECT_EQ(cli("run --scenario " + (kScenarios / "minimal.json").string() +
                " --seed 99 --comm-mode ring --out-dir " + dir_.string()),
            0);
  const auto rows = parse_metrics_csv(read_text_file(dir_ / "interactive" / "metrics.csv"));
  EXPECT_EQ(rows.front().seed, 99u);
}

TEST_F(Cli, CompareWritesEveryPolicy) {
  EXPECT_EQ(cli("compare --scenario " + (kScenarios / "minimal.json").string() + " --seeds 3 --out-dir " +
                dir_.string()),
            0);
  for (const char* p : {"uniform", "greedy", "oracle", "interactive", "lower-bound"}) {
    const std::string text = read_text_file(dir_ / p / "metrics.csv");
    EXPECT_EQ(parse_metrics_csv(text).size(), 12u) << p;
  }
  const std::string summary = read_text_file(dir_ / "summary.json");
  EXPECT_NE(summary.find("improvement_pct"), std::string::npos);
  EXPECT_NE(summary.find("verify_verdicts"), std::string::npos);
}

TEST_F(Cli, VerifyPassesOnMinimal) {
  EXPECT_EQ(cli("verify --scenario " + (kScenarios / "minimal.json").string()), 0);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(cli("run --scenario " + (kScenarios / "minimal.json").string() + " --policy greddy"), 2);
  const std::string bad = write("bad.json", R"({"n_class": 2, "n_robot": 1, "rounds": 1, "target": [1, 1],
    "robots": [{"true_dist": [0.5, 0.5], "confusion": [[0.5, 0.4], [0.1, 0.9]], "obs_per_round": 100,
                "cache_budget": 2}]})");
  EXPECT_EQ(cli("run --scenario " + bad), 2);
  EXPECT_EQ(cli("run"), 2);
  EXPECT_EQ(cli("run --scenario " + (dir_ / "missing.json").string()), 2);
}

TEST_F(Cli, ConvergenceFailureExitsThree) {
  const std::string doc = R"({"n_class": 3, "n_robot": 3, "rounds": 1, "target": [40, 25, 10],
    "solver": {"max_sweeps": 1, "sweep_threshold": 1e-300},
    "robots": [{"true_dist": [0.7, 0.2, 0.1], "confusion": "noisy-symmetric:0.7", "obs_per_round": 200, "cache_budget": 10},
               {"true_dist": [0.1, 0.6, 0.3], "confusion": "noisy-symmetric:0.8", "obs_per_round": 200, "cache_budget": 10},
               {"true_dist": [0.3, 0.3, 0.4], "confusion": "noisy-symmetric:0.6", "obs_per_round": 200, "cache_budget": 10}]})";
  EXPECT_EQ(cli("run --scenario " + write("slow.json", doc) + " --out-dir " + dir_.string()), 3);
}
