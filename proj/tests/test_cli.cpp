#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smoothtest/besov.hpp"
#include "smoothtest/cli.hpp"
#include "smoothtest/serialization.hpp"
#include "smoothtest/smooth_test.hpp"

using namespace smoothtest;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("smoothtest_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("SMOOTHTEST_SEED");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenNullThenCheck) {
  const auto gen = cli({"gen", "--kind", "null_worst_case", "--s", "2", "--B", "1.5", "--lmax",
                        "6", "--seed", "3", "-o", path("null.json")});
  ASSERT_EQ(gen.code, exit_code::kAccept) << gen.err;
  EXPECT_TRUE(fs::exists(path("null.json.manifest.json")));
  const auto check = cli({"check", "--tree", path("null.json"), "--s", "2", "--t", "1", "--B",
                          "1.5"});
  ASSERT_EQ(check.code, exit_code::kAccept) << check.err;
  const Json report = Json::parse(check.out);
  EXPECT_NEAR(report.at("besov_norm_s").get<double>(), 1.5, 1e-9);
  EXPECT_EQ(report.at("distance_to_s_ball").get<double>(), 0.0);
  EXPECT_TRUE(report.at("in_s_ball").get<bool>());
  EXPECT_EQ(report.at("manifest").at("subcommand"), "check");
}

TEST_F(CliTest, GenRademacherAboveRadiusIsDomainError) {
  const auto run = cli({"gen", "--kind", "rademacher_alt", "--B", "0.5", "--upsilon", "0.8",
                        "-o", path("alt.json")});
  EXPECT_EQ(run.code, exit_code::kDomain);
  EXPECT_NE(run.err.find("upsilon"), std::string::npos);
}

TEST_F(CliTest, GenSeparatedPassesRecheck) {
  const auto gen = cli({"gen", "--kind", "separated_alt", "--t", "1", "--s", "2", "--rho",
                        "0.2", "--lmax", "8", "-o", path("sep.json")});
  ASSERT_EQ(gen.code, exit_code::kAccept) << gen.err;
  const Json report = Json::parse(cli({"check", "--tree", path("sep.json")}).out);
  EXPECT_GE(report.at("distance_to_s_ball").get<double>(), 0.2 * (1.0 - 1e-12));
  EXPECT_TRUE(report.at("in_t_ball").get<bool>());
  const auto infeasible = cli({"gen", "--kind", "separated_alt", "--rho", "1", "--lmax", "8",
                               "-o", path("bad.json")});
  EXPECT_EQ(infeasible.code, exit_code::kFeasibility);
}

TEST_F(CliTest, TestExitCodes) {
  write("zero.json", tree_to_json(CoefficientTree(TreeShape{0, 1, 7})).dump());
  const auto accept = cli({"test", "--input", path("zero.json"), "--n", "1e6"});
  EXPECT_EQ(accept.code, exit_code::kAccept) << accept.err;
  EXPECT_EQ(Json::parse(accept.out).at("decision"), 0);

  CoefficientTree big(TreeShape{0, 1, 7});
  big.set(1, 0, 2.0);
  write("big.json", tree_to_json(big).dump());
  const auto reject = cli({"test", "--input", path("big.json"), "--n", "1e6", "--csv",
                           path("report.csv")});
  EXPECT_EQ(reject.code, exit_code::kReject) << reject.err;
  EXPECT_EQ(slurp(path("report.csv")).substr(0, 9), "n,t,s,B,a");

  write("short.json", tree_to_json(CoefficientTree(TreeShape{0, 1, 3})).dump());
  EXPECT_EQ(cli({"test", "--input", path("short.json"), "--n", "1e6"}).code,
            exit_code::kCoverage);
  write("garbage.json", "{not json");
  EXPECT_EQ(cli({"test", "--input", path("garbage.json"), "--n", "1e6"}).code,
            exit_code::kStructural);
}

TEST_F(CliTest, ObserveThenTestSplit) {
  write("zero.json", tree_to_json(CoefficientTree(TreeShape{0, 1, 7})).dump());
  ASSERT_EQ(cli({"observe", "--tree", path("zero.json"), "--n", "1e6", "--split", "--seed", "4",
                 "-o", path("h1.json"), "--out2", path("h2.json")})
                .code,
            exit_code::kAccept);
  const Observation h1 = observation_from_json(read_json_file(path("h1.json")));
  EXPECT_EQ(h1.n, 5e5);
  EXPECT_EQ(h1.split, 1);
  const auto run = cli({"test", "--input", path("h1.json"), "--input2", path("h2.json")});
  EXPECT_EQ(run.code, exit_code::kAccept) << run.err;
  const Json report = Json::parse(run.out);
  EXPECT_EQ(report.at("statistic"), "split/analytic_default");
  EXPECT_EQ(report.at("params").at("n").get<double>(), 1e6);
}

TEST_F(CliTest, McManifestReplayReproducesCsv) {
  // Amplitudes straddle the level-0 threshold so rejection counts vary.
  write("mc.json", R"({"params": {"n": 10000, "B": 0.05},
                       "signal": {"kind": "null_random", "L_max": 5},
                       "trials": 200, "seed": 11, "amplitude_grid": [0.42, 0.43, 0.44]})");
  const auto run = cli({"mc", "--config", path("mc.json"), "-o", path("mc.csv"), "--jobs", "3"});
  ASSERT_EQ(run.code, exit_code::kAccept) << run.err;
  const std::string first = slurp(path("mc.csv"));
  EXPECT_EQ(first.substr(0, first.find('\n')), "n,amplitude,trials,rejections,rate,ci_lo,ci_hi");

  const auto replay = cli({"replay", path("mc.csv.manifest.json"), "-o", path("again.csv")});
  ASSERT_EQ(replay.code, exit_code::kAccept) << replay.err;
  EXPECT_EQ(slurp(path("again.csv")), first);

  // The environment seed is recorded, so the replay ignores a later change.
  setenv("SMOOTHTEST_SEED", "77", 1);
  ASSERT_EQ(cli({"mc", "--config", path("mc.json"), "-o", path("env.csv")}).code, 0);
  setenv("SMOOTHTEST_SEED", "78", 1);
  ASSERT_EQ(cli({"replay", path("env.csv.manifest.json"), "-o", path("env2.csv")}).code, 0);
  EXPECT_EQ(slurp(path("env.csv")), slurp(path("env2.csv")));
  EXPECT_NE(slurp(path("env.csv")), first);
  unsetenv("SMOOTHTEST_SEED");
}

TEST_F(CliTest, LbCheckEnumerationMatchesClosedForm) {
  const auto run = cli({"lb-check", "--trials", "2000", "-o", path("lb.csv")});
  ASSERT_EQ(run.code, exit_code::kAccept) << run.err;
  std::istringstream in(slurp(path("lb.csv")));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "upsilon,j,closed_form,enumeration,mc_estimate,mc_se,bound_2v4");
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
    ASSERT_EQ(cells.size(), 7u);
    EXPECT_LE(std::fabs(cells[3] - cells[2]), 1e-12 * std::max(cells[2], 1e-300)) << line;
    EXPECT_LE(cells[2], cells[6]);
    ++rows;
  }
  EXPECT_EQ(rows, 30);
}

TEST_F(CliTest, IngestRegressionCsv) {
  std::ofstream csv(path("samples.csv"));
  csv << "x,y\n";
  const int n = 1 << 12;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    csv << format_double(x) << "," << (x < 0.25 ? 20.0 : 0.0) << "\n";
  }
  csv.close();
  const auto run = cli({"ingest", "--csv", path("samples.csv"), "--json", path("report.json"),
                        "--tree-out", path("tree.json")});
  EXPECT_EQ(run.code, exit_code::kReject) << run.err;
  const Json report = read_json_file(path("report.json"));
  EXPECT_TRUE(report.at("approximate_calibration").get<bool>());
  EXPECT_EQ(read_json_file(path("tree.json")).at("z0"), 2);
  EXPECT_TRUE(fs::exists(path("report.json.manifest.json")));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_NE(cli({}).code, 0);
  EXPECT_NE(cli({"frobnicate"}).code, 0);
  EXPECT_EQ(cli({"--version"}).code, 0);
}

#ifdef SMOOTHTEST_CLI_PATH
TEST_F(CliTest, BinaryExitCodesReachTheShell) {
  write("zero.json", tree_to_json(CoefficientTree(TreeShape{0, 1, 7})).dump());
  CoefficientTree big(TreeShape{0, 1, 7});
  big.set(1, 0, 2.0);
  write("big.json", tree_to_json(big).dump());
  const auto status = [&](const std::string& input) {
    const std::string command = std::string(SMOOTHTEST_CLI_PATH) + " test --input " + path(input) +
                                " --n 1e6 > /dev/null";
    return WEXITSTATUS(std::system(command.c_str()));
  };
  EXPECT_EQ(status("zero.json"), 0);
  EXPECT_EQ(status("big.json"), 3);
}
#endif
