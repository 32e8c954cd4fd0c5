/*
 * Copyright 2026 The ginse-overlaps Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(GINSE_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / ("ginse_cli_test_" + name);
  std::ofstream(p) << content;
  return p;
}

TEST(Cli, ExactDiagCsv) {
  const Result r = run("exact-diag --n 2 --x 0,1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("# ginse-overlaps v1\n", 0), 0u);
  EXPECT_NE(r.out.find("exact_diag,0,1,,,0.40206654696784"), std::string::npos) << r.out;
}

TEST(Cli, JsonFormatAndConfigPrecedence) {
  const auto cfg = temp_file("cfg.json", R"({"n": 5, "alpha": 1.5, "sigma_sq": 0.5, "x": ["0.3,0.7"]})");
  const Result r = run("density --config " + cfg.string() + " --n 4 --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["metadata"]["params"]["n"], 4);  // flag wins
  EXPECT_EQ(j["metadata"]["params"]["alpha"], 1.5);  // file value kept
  EXPECT_NEAR(j["rows"][0]["value"][0].get<double>(), 0.143274521164907, 1e-13);
}

TEST(Cli, OffdiagAndOrigin) {
  Result r = run("exact-offdiag --n 3 --x1 0.3,0.6 --x2 -0.4,0.5 --format json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["rows"][0]["value"][0].get<double>(), -0.00824065054570949, 1e-15);
  r = run("origin --n 2 --format json");
  ASSERT_EQ(r.code, 0);
  j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["rows"][0]["value"][0].get<double>(), 5.0 / (3.0 * 3.14159265358979323846), 1e-14);
}

TEST(Cli, MonteCarloWritesFile) {
  const auto out = std::filesystem::temp_directory_path() / "ginse_cli_test_mc.csv";
  const Result r = run("mc-diag --n 2 --samples 200 --grid -1,1,0,1,2,2 --out " + out.string());
  ASSERT_EQ(r.code, 0);
  std::ifstream f(out);
  std::string line;
  int lines = 0;
  while (std::getline(f, line)) ++lines;
  EXPECT_EQ(lines, 6);
}

TEST(Cli, SampleCheckPasses) { EXPECT_EQ(run("sample-check --n 4 --samples 20").code, 0); }

TEST(Cli, ValidateSuiteFilter) {
  const Result r = run("validate --suite pfaffian");
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["results"].size(), 1u);
  EXPECT_EQ(j["results"][0]["id"], 9);
}

TEST(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("exact-diag --n notanumber").code, 2);
  EXPECT_EQ(run("exact-diag --n 0 --x 0,1").code, 2);
  EXPECT_EQ(run("exact-diag --x '0;1'").code, 2);
  EXPECT_EQ(run("mc-diag --alpha 1 --route direct --samples 5").code, 2);
  EXPECT_EQ(run("validate --suite nonsense").code, 2);
  EXPECT_EQ(run("exact-diag --config /nonexistent/ginse.json").code, 2);
  const auto bad = temp_file("bad.json", "{ \"n\": 3, ");
  EXPECT_EQ(run("exact-diag --config " + bad.string()).code, 2);
  const auto unknown = temp_file("unknown.json", R"({"bogus": 1})");
  EXPECT_EQ(run("exact-diag --config " + unknown.string()).code, 2);
}

}  // namespace
