#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string bin() {
  const char* b = std::getenv("DLPP_BIN");
  return b == nullptr ? std::string("dlpp") : std::string(b);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dlpp_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + bin() + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, SpectralExactReport) {
  const auto dir = scratch("spectral");
  ASSERT_EQ(run("spectral --lattice 3x3 --t 0.2,1.0 --out " + dir.string()), 0);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(report["subcommand"], "spectral");
  EXPECT_FALSE(report["version"].get<std::string>().empty());
  EXPECT_TRUE(report.contains("wall_time_seconds"));
  EXPECT_EQ(report["config"]["lattice"], "3x3");
  ASSERT_EQ(report["checks"].size(), 5u);
  for (const auto& c : report["checks"]) {
    EXPECT_EQ(c["verdict"], "pass") << c["name"];
    EXPECT_LT(c["details"]["gap"].get<double>(), 1e-9);
  }
  EXPECT_EQ(slurp(dir / "results.csv").rfind("model,n,m,param,t,tau,estimate,sem,samples,seed\n", 0), 0u);
  EXPECT_TRUE(fs::exists(dir / "plot.svg"));
}

TEST(Cli, ConfigErrorsExitTwo) {
  const auto dir = scratch("errors");
  EXPECT_EQ(run("simulate --n abc --out " + dir.string()), 2);
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("simulate --config " + (dir / "missing.json").string()), 2);
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_EQ(run("simulate --config " + (dir / "bad.json").string()), 2);
  std::ofstream(dir / "unknown.json") << R"({"nope": 1})";
  EXPECT_EQ(run("simulate --config " + (dir / "unknown.json").string()), 2);
  // infeasible: proxy spacing 2^{-m} finer than the lattice
  EXPECT_EQ(run("proxy-demo --n 2 --m 2 --samples 2 --out " + dir.string()), 2);
}

TEST(Cli, FailingCheckExitsOne) {
  const auto dir = scratch("fail");
  // at t = 0 the proxy never strictly beats the baseline
  EXPECT_EQ(run("proxy-demo --n 64 --m 2 --t 0 --samples 5 --out " + dir.string()), 1);
}

TEST(Cli, SameSeedSameCsvAcrossThreads) {
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  const std::string args = "transition-sweep --model bernoulli --n 8,16 --tau 0.05:10:log5 --samples 50 --seed 3";
  ASSERT_EQ(run(args + " --threads 1 --out " + a.string()), 0);
  ASSERT_EQ(run(args + " --threads 3 --out " + b.string()), 0);
  const std::string csv = slurp(a / "results.csv");
  EXPECT_EQ(csv, slurp(b / "results.csv"));
  std::size_t lines = 0;
  for (char ch : csv) lines += ch == '\n';
  EXPECT_EQ(lines, 1u + 2u * 5u);
  EXPECT_TRUE(fs::exists(a / "plot.svg"));
}

TEST(Cli, ConfigPrecedence) {
  const auto dir = scratch("precedence");
  std::ofstream(dir / "cfg.json") << R"({"n": [6], "samples": 20, "seed": 11, "t": [0.5], "out": ")" << (dir / "from_file").string()
                                  << R"("})";
  ASSERT_EQ(run("simulate --config " + (dir / "cfg.json").string() + " --samples 30", "DLPP_SEED=99"), 0);
  const auto report = nlohmann::json::parse(slurp(dir / "from_file" / "report.json"));
  EXPECT_EQ(report["config"]["seed"], 11);
  EXPECT_EQ(report["config"]["samples"], "30");
  const std::string csv = slurp(dir / "from_file" / "results.csv");
  EXPECT_NE(csv.find(",30,11\n"), std::string::npos);

  const auto env_dir = dir / "env";
  ASSERT_EQ(run("simulate --n 6 --samples 10 --out " + env_dir.string(), "DLPP_SEED=99"), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(env_dir / "report.json"))["config"]["seed"], 99);
}
