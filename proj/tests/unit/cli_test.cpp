#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "crossguard/controller_json.hpp"

namespace crossguard {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& name) {
  return std::string(CROSSGUARD_SCENARIO_DIR) + "/" + name + ".json";
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("crossguard-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, RunAndReplay) {
  const auto r = cli({"run", scenario("basic"), "--log", path("b.jsonl"), "--report", path("b.json")});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  ASSERT_TRUE(fs::exists(path("b.jsonl")));
  std::ifstream report_in(path("b.json"));
  const auto report = Json::parse(report_in);

  const auto replay = cli({"replay", path("b.jsonl")});
  EXPECT_EQ(replay.code, cli::kOk) << replay.err;
  EXPECT_EQ(Json::parse(replay.out), report);
}

TEST_F(CliTest, UnsafeRunExitsWithSafetyCode) {
  const auto r = cli({"run", scenario("fast_train"), "--log", path("f.jsonl"), "--report", path("f.json")});
  EXPECT_EQ(r.code, cli::kSafety);
  EXPECT_EQ(cli({"replay", path("f.jsonl")}).code, cli::kSafety);
}

TEST_F(CliTest, Validation) {
  EXPECT_EQ(cli({"validate", scenario("outage")}).code, cli::kOk);
  std::ofstream(path("bad.json")) << R"({"duration_s":10})";
  const auto r = cli({"validate", path("bad.json")});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.err.find("seed"), std::string::npos);
  EXPECT_EQ(cli({"run", path("missing.json")}).code, cli::kValidation);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, cli::kUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(cli({"tables", "--trials", "0"}).code, cli::kUsage);
  EXPECT_EQ(cli({"montecarlo", "--condition", "dusk", "--class", "train"}).code, cli::kUsage);
}

TEST_F(CliTest, UnwritableOutput) {
  const auto r = cli({"run", scenario("basic"), "--log", "/nonexistent/dir/x.jsonl"});
  EXPECT_EQ(r.code, cli::kOutput);
}

TEST_F(CliTest, MonteCarloPrintsJson) {
  const auto r = cli({"montecarlo", "--condition", "day", "--class", "train", "--trials", "2000"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["trials"], 2000);
}

}  // namespace
}  // namespace crossguard
