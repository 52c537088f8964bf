#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.h"
#include "dcs/io.h"
#include "dcs/networks.h"
#include "dcs/serialize.h"
#include "dcs/solver.h"

namespace dcs {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "dcs");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("DCS_OUTPUT_DIR");
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("dcs_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  std::string WriteProblem() {
    GaussianOptions opts;
    opts.a_scale = 0.3;
    const SystemModel sys = GaussianSystem(6, 12, 6, 4, opts).sys;
    const SparseInputs u = GenerateSparseInputs(12, 3, 1, ValueDistribution{}, 5);
    const Trajectory t = Simulate(sys, u.inputs, Vector::Zero(6));
    const std::string path = Path("problem.json");
    WriteFile(path, DumpJson(ToJson(RecoveryProblem{sys, t.outputs})));
    return path;
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(RunCli({"--help"}).code, 0);
  EXPECT_EQ(RunCli({"rip", "--help"}).code, 0);
  const Outcome none = RunCli({});
  EXPECT_EQ(none.code, 2);
  EXPECT_NE(none.err.find("error:"), std::string::npos);
  EXPECT_EQ(RunCli({"rip", "--no-such-flag"}).code, 2);
  EXPECT_EQ(RunCli({"rip", "--mode", "approximate"}).code, 2);
  EXPECT_EQ(RunCli({"--config", Path("missing.json"), "rip"}).code, 2);
}

TEST_F(CliTest, RuntimeErrorsReportKind) {
  const Outcome missing = RunCli({"rip", "--matrix", Path("nope.csv"), "--s", "1"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(json::parse(missing.err)["kind"], "io");

  WriteFile(Path("config.json"), R"({"matrix": "x.csv", "colour": 3})");
  const Outcome unknown = RunCli({"--config", Path("config.json"), "rip"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_EQ(json::parse(unknown.err)["kind"], "format");
  EXPECT_NE(unknown.err.find("colour"), std::string::npos);
}

TEST_F(CliTest, RipOnMatrixFile) {
  WriteMatrixCsv(Path("b.csv"), Matrix::Identity(4, 4));
  const Outcome r = RunCli({"rip", "--matrix", Path("b.csv"), "--s", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["delta"].get<double>(), 0.0);
  EXPECT_EQ(j["mode"], "exact");
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  WriteMatrixCsv(Path("b.csv"), Matrix::Identity(4, 4));
  WriteFile(Path("config.json"), json{{"matrix", Path("b.csv")}, {"s", 1}}.dump());
  const Outcome r = RunCli({"--config", Path("config.json"), "rip", "--s", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["s"], 3);
}

TEST_F(CliTest, RecoverIsByteIdenticalAcrossRuns) {
  const std::string problem = WriteProblem();
  const Outcome a = RunCli({"recover", "--problem", problem, "--out", Path("a.json")});
  const Outcome b = RunCli({"recover", "--problem", problem, "--out", Path("b.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(ReadFile(Path("a.json")), ReadFile(Path("b.json")));
  const json sol = json::parse(ReadFile(Path("a.json")));
  EXPECT_TRUE(sol.contains("objective"));
}

TEST_F(CliTest, SolverFlagsReachTheSolver) {
  const std::string problem = WriteProblem();
  const Outcome r = RunCli({"recover", "--problem", problem, "--max-iterations", "25"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(json::parse(r.out)["iterations"].get<int>(), 25);
}

TEST_F(CliTest, GenerateWritesSystemAndProvenance) {
  const Outcome r = RunCli({"generate", "gaussian", "--n", "4", "--m", "6", "--p", "3", "--seed", "9",
                            "--out", Path("gen")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"A.csv", "B.csv", "C.csv", "system.json", "provenance.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "gen" / f)) << f;
  }
  EXPECT_EQ(json::parse(ReadFile(Path("gen/provenance.json")))["seed"], 9);
  const SystemModel sys = SystemFromJson(json::parse(ReadFile(Path("gen/system.json"))));
  EXPECT_EQ(sys.B(), GaussianSystem(4, 6, 3, 9).sys.B());

  const Outcome again = RunCli({"generate", "gaussian", "--n", "4", "--m", "6", "--p", "3", "--seed",
                                "9", "--out", Path("gen2")});
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(ReadFile(Path("gen/system.json")), ReadFile(Path("gen2/system.json")));
}

TEST_F(CliTest, OutputDirectoryFromEnvironment) {
  setenv("DCS_OUTPUT_DIR", Path("env").c_str(), 1);
  const std::string problem = WriteProblem();
  const Outcome r = RunCli({"recover", "--problem", problem});
  unsetenv("DCS_OUTPUT_DIR");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(fs::exists(dir_ / "env" / "solution.json"));
}

TEST_F(CliTest, BoundsAllIncludesEveryKind) {
  const SystemModel sys = SystemModel::Create(Matrix::Zero(3, 3), Matrix::Ones(3, 4),
                                              Matrix::Identity(3, 3));
  WriteFile(Path("sys.json"), DumpJson(ToJson(sys)));
  const Outcome r = RunCli({"bounds", "--system", Path("sys.json"), "--delta2s", "0.1", "--horizon",
                            "5", "--eps", "0.5", "--eps-prime", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["static"]["static_bound"].get<double>(), 27.651947673292394, 1e-10);
  EXPECT_FALSE(j["dynamic"].is_null());
  EXPECT_FALSE(j["recovery"].is_null());
}

}  // namespace
}  // namespace dcs
