// Copyright 2026 The pirpsi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

namespace pirpsi::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("pirpsi-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the built tool and returns its exit status.
int run_tool(const std::string& args, std::string* output = nullptr) {
  const std::string cmd = std::string(PIRPSI_TOOL) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return -1;
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  if (output) *output = out;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(ParseTest, CacheSpec) {
  auto [ids, ratios] = parse_cache("1:1/2, 4:1/4");
  EXPECT_EQ(ids, (std::vector<MessageId>{1, 4}));
  EXPECT_EQ(ratios, (std::vector<Rational>{Rational(1, 2), Rational(1, 4)}));
  EXPECT_THROW(parse_cache("1=1/2"), ValidationError);
  EXPECT_THROW(parse_cache("a:1/2"), ValidationError);
  EXPECT_THROW(parse_cache("1:0.5"), ValidationError);
  EXPECT_TRUE(parse_cache("").first.empty());
}

TEST(CapacityCommandTest, ReferenceValues) {
  EXPECT_EQ(cmd_capacity({2, 5, "1/2,1/2"}).text, "59/32 (1.84375)\n");
  EXPECT_EQ(cmd_capacity({2, 5, "1/2,1/4,1/4"}).text, "29/16 (1.8125)\n");
  EXPECT_EQ(cmd_capacity({2, 5, ""}).text, "31/16 (1.9375)\n");
  // Order on the command line does not matter.
  EXPECT_EQ(cmd_capacity({2, 5, "1/4,1/2,1/4"}).text, "29/16 (1.8125)\n");
}

TEST(CapacityCommandTest, JsonAndCsv) {
  auto j = nlohmann::json::parse(
      cmd_capacity({2, 5, "1/2,1/2", Format::kJson}).text);
  EXPECT_EQ(j["cost"], "59/32");
  auto csv = cmd_capacity({2, 5, "1/2,1/2", Format::kCsv}).text;
  EXPECT_NE(csv.find("59/32"), std::string::npos);
  EXPECT_EQ(csv.rfind("n,k,m,ratios,cost,decimal\n", 0), 0u);
}

TEST(OptimizeCommandTest, AllMessagesBest) {
  OptimizeOptions o{3, 5, "1", {}, true, Format::kJson};
  auto res = cmd_optimize(o);
  EXPECT_EQ(res.code, kExitOk);
  auto j = nlohmann::json::parse(res.text);
  EXPECT_EQ(j["best"]["m"], 5);
  EXPECT_EQ(j["best"]["cost"], "484/405");
  EXPECT_EQ(j["best"]["ratios"][0], "1/5");
  EXPECT_TRUE(j["grid"]["agrees"].get<bool>());
  EXPECT_EQ(j["candidates"].size(), 5u);
}

TEST(OptimizeCommandTest, FixedM) {
  auto j = nlohmann::json::parse(
      cmd_optimize({3, 5, "1", 3u, false, Format::kJson}).text);
  EXPECT_EQ(j["best"]["cost"], "350/243");
  EXPECT_EQ(j["best"]["ratios"][2], "1/3");
}

TEST(OptimizeCommandTest, TwoCandidates) {
  auto res = cmd_optimize({2, 3, "3/2"});
  EXPECT_EQ(res.text.rfind("2 uniform candidates", 0), 0u);
  EXPECT_THROW(cmd_optimize({2, 3, "4"}), ValidationError);
}

TEST(SimulateCommandTest, ExampleReport) {
  auto dir = scratch("sim");
  SimulateOptions o;
  o.n = 2;
  o.k = 5;
  o.theta = 3;
  o.cache = "1:1/2,4:1/2";
  o.seed = 11;
  o.out = (dir / "r.json").string();
  auto res = cmd_simulate(o);
  EXPECT_EQ(res.code, kExitOk);
  auto j = nlohmann::json::parse(slurp(dir / "r.json"));
  EXPECT_EQ(j["normalized"], "59/32");
  EXPECT_TRUE(j["decode_ok"].get<bool>());
  EXPECT_EQ(j["segments"].size(), 2u);
  EXPECT_EQ(j["version"], PIRPSI_VERSION);
  EXPECT_EQ(j["config"]["seed"], 11);
  EXPECT_TRUE(j["seeds"].contains("retrieval"));
}

TEST(SimulateCommandTest, ThetaCachedAndEmptyCache) {
  SimulateOptions o;
  o.n = 2;
  o.k = 5;
  o.theta = 4;
  o.cache = "1:1/2,4:1/2";
  auto a = simulate(o);
  EXPECT_TRUE(a.decode_ok);
  EXPECT_EQ(a.normalized, Rational(59, 32));
  o.cache = "";
  auto b = simulate(o);
  EXPECT_TRUE(b.decode_ok);
  EXPECT_EQ(b.normalized, classic_cost(2, 5));
}

TEST(SimulateCommandTest, ByteIdenticalReruns) {
  auto dir = scratch("rerun");
  SimulateOptions o;
  o.n = 3;
  o.k = 3;
  o.theta = 2;
  o.cache = "1:1/3,3:2/3";
  o.seed = 5;
  o.out = (dir / "a.json").string();
  o.transcript = (dir / "a.bin").string();
  cmd_simulate(o);
  o.out = (dir / "b.json").string();
  o.transcript = (dir / "b.bin").string();
  cmd_simulate(o);
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  EXPECT_EQ(slurp(dir / "a.bin"), slurp(dir / "b.bin"));
  EXPECT_FALSE(slurp(dir / "a.bin").empty());
}

TEST(AuditCommandTest, ExactPasses) {
  AuditOptions o;
  o.n = 2;
  o.k = 2;
  o.m = 1;
  auto res = cmd_audit(o);
  EXPECT_EQ(res.code, kExitOk);
  EXPECT_NE(res.text.find("pass"), std::string::npos);
}

TEST(AuditCommandTest, ExactOutOfReach) {
  AuditOptions o;
  o.n = 2;
  o.k = 3;
  o.m = 1;
  EXPECT_THROW(cmd_audit(o), ScaleError);
}

TEST(TablesCommandTest, AllRowsMatch) {
  auto dir = scratch("tables");
  auto res = cmd_tables({dir.string()});
  EXPECT_EQ(res.code, kExitOk);
  const auto csv = slurp(dir / "tables.csv");
  EXPECT_EQ(csv.rfind("id,expected,measured,status\n", 0), 0u);
  EXPECT_NE(csv.find("ex1,59/32,59/32,match\n"), std::string::npos);
  EXPECT_NE(csv.find("ex2,29/16,29/16,match\n"), std::string::npos);
  EXPECT_NE(csv.find("fig1-opt1,40/27,40/27,match\n"), std::string::npos);
  EXPECT_NE(csv.find("fig1-opt4,350/243,350/243,match\n"), std::string::npos);
  EXPECT_EQ(csv.find("mismatch"), std::string::npos);
}

TEST(ToolTest, ExitCodes) {
  std::string out;
  EXPECT_EQ(run_tool("capacity --n 2 --k 5 --r 1/2,1/2", &out), 0);
  EXPECT_EQ(out, "59/32 (1.84375)\n");
  EXPECT_EQ(run_tool("capacity --n 2 --k 5 --r 0.5"), 2);
  EXPECT_EQ(run_tool("capacity --n 2 --k 5 --r 1/0"), 2);
  EXPECT_EQ(run_tool("capacity --n 2"), 2);
  EXPECT_EQ(run_tool("bogus"), 2);
  EXPECT_EQ(run_tool("optimize --n 2 --k 3 --s 7/2"), 2);
  EXPECT_EQ(run_tool("simulate --n 2 --k 5 --theta 1 --cache 1:1/2 --l 32"), 2);
  EXPECT_EQ(run_tool("audit --n 2 --k 3 --m 1 --mode exact", &out), 2);
  EXPECT_NE(out.find("--mode sample"), std::string::npos);
}

TEST(ToolTest, FormatAfterSubcommand) {
  std::string out;
  EXPECT_EQ(run_tool("capacity --n 2 --k 5 --r 1/2,1/2 --format json", &out), 0);
  EXPECT_EQ(nlohmann::json::parse(out)["cost"], "59/32");
}

TEST(ToolTest, ConfigOverridesFlags) {
  auto dir = scratch("config");
  {
    std::ofstream f(dir / "c.json");
    f << R"({"k": 5, "r": "1/2,1/4,1/4"})";
  }
  std::string out;
  EXPECT_EQ(run_tool("capacity --n 2 --k 3 --config " + (dir / "c.json").string(),
                     &out),
            0);
  EXPECT_EQ(out, "29/16 (1.8125)\n");
  {
    std::ofstream f(dir / "bad.json");
    f << R"({"nope": 1})";
  }
  EXPECT_EQ(run_tool("capacity --n 2 --k 3 --config " +
                     (dir / "bad.json").string()),
            2);
}

TEST(ToolTest, OutputDirectoryFromEnvironment) {
  auto dir = scratch("env");
  EXPECT_EQ(run_tool("simulate --n 2 --k 2 --theta 1 --cache 2:1/2 --seed 3",
                     nullptr),
            0);
  const std::string env = "PIRPSI_OUT_DIR=" + dir.string() + " ";
  const std::string cmd = env + PIRPSI_TOOL +
                          " simulate --n 2 --k 2 --theta 1 --cache 2:1/2 "
                          "--seed 3 > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  auto j = nlohmann::json::parse(slurp(dir / "simulate.json"));
  EXPECT_TRUE(j["decode_ok"].get<bool>());
}

}  // namespace
}  // namespace pirpsi::cli
