/* Copyright 2026 The QPS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace {

struct CliRun {
  int code = -1;
  std::string out;  // stdout
  std::string err;  // stderr
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CliRun run(const std::string& args, const std::string& env = "") {
  const std::string out_path = "cli_test_stdout.txt";
  const std::string err_path = "cli_test_stderr.txt";
  std::string cmd = env + " " + QPS_CLI_PATH + " " + args + " > " + out_path +
                    " 2> " + err_path;
  int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> out;
  std::stringstream s(line);
  for (std::string cell; std::getline(s, cell, ',');) {
    out.push_back(cell.empty() ? std::nan("") : std::stod(cell));
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

TEST(Cli, SuperresSlopes) {
  CliRun r = run("superres --q 0.3 --sigma 1 --lambda 1e-2 --x-min 1e-4 --x-max 1e-1 --points 40 --log");
  EXPECT_EQ(r.code, 0) << r.err;
  std::vector<std::string> lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 41u);
  EXPECT_EQ(lines[0], "x,p_success,eps0,eps1,eps0_theory,eps1_theory,qfi_rho,qfi_post,ratio");
  EXPECT_NE(r.err.find("PASS eps0 slope"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("PASS eps1 slope"), std::string::npos) << r.err;
  // Smallest x: eps0 / x close to the leading-order slope.
  std::vector<double> first = fields(lines[1]);
  EXPECT_NEAR(first[2] / first[0], 1.27279, 0.02 * 1.27279);
}

TEST(Cli, TwoQubitSinglePoint) {
  CliRun r = run("two-qubit --q1 0.3 --lambda 1e-4 --x 0.2");
  EXPECT_EQ(r.code, 0) << r.err;
  std::vector<std::string> lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 2u);
  std::vector<double> row = fields(lines[1]);
  ASSERT_EQ(row.size(), 9u);
  EXPECT_NEAR(row[8], 1.0, 1e-5);
  EXPECT_NEAR(row[6], 4.0, 1e-8);
  EXPECT_TRUE(std::isnan(row[4]));
  EXPECT_TRUE(std::isnan(row[5]));
}

TEST(Cli, LambdaOutOfRangeIsUsageError) {
  CliRun r = run("superres --lambda 1.5");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("LambdaOutOfRange"), std::string::npos) << r.err;
}

TEST(Cli, ParseErrors) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("superres --no-such-flag").code, 1);
  EXPECT_EQ(run("superres --q abc").code, 1);
  EXPECT_EQ(run("verify --trials 0").code, 1);
}

TEST(Cli, VerifyPassesAndCatchesBrokenPovm) {
  CliRun ok = run("verify --trials 50 --seed 7");
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  EXPECT_EQ(lines_of(ok.out).size(), 5u);
  CliRun broken = run("verify --trials 5 --inject-broken-povm");
  EXPECT_EQ(broken.code, 2);
  EXPECT_NE(broken.out.find("FAIL povm_validity: 4/5"), std::string::npos) << broken.out;
  EXPECT_NE(broken.out.find("counterexample: {"), std::string::npos);
  EXPECT_NE(broken.out.find("\"trial\":0"), std::string::npos);
}

TEST(Cli, ToleranceFailureExitsTwo) {
  CliRun r = run("superres --slope-tol 1e-9");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("FAIL eps0 slope"), std::string::npos) << r.err;
}

TEST(Cli, OutputFileAndByteStability) {
  CliRun a = run("ancilla --points 4 --x-min 0.1 --x-max 0.4 -o cli_a.csv");
  CliRun b = run("ancilla --points 4 --x-min 0.1 --x-max 0.4 -o cli_b.csv");
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(b.code, 0) << b.err;
  std::string csv = slurp("cli_a.csv");
  EXPECT_EQ(lines_of(csv).size(), 5u);
  EXPECT_EQ(csv, slurp("cli_b.csv"));
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_NE(a.out.find("PASS amplification ratio"), std::string::npos);
}

TEST(Cli, ConfigFileAndOverrides) {
  write_file("cli_cfg.json", R"({"q1": 0.3, "lambda": 1e-4, "x": 0.2, "output": "cli_cfg.csv"})");
  CliRun r = run("two-qubit --config cli_cfg.json");
  EXPECT_EQ(r.code, 0) << r.err;
  std::vector<double> row = fields(lines_of(slurp("cli_cfg.csv"))[1]);
  EXPECT_DOUBLE_EQ(row[0], 0.2);
  EXPECT_NEAR(row[1], 1e-4, 1e-12);

  CliRun over = run("two-qubit --config cli_cfg.json --lambda 1e-2");
  EXPECT_EQ(over.code, 0) << over.err;
  row = fields(lines_of(slurp("cli_cfg.csv"))[1]);
  EXPECT_NEAR(row[1], 1e-2, 1e-12);

  write_file("cli_bad.json", R"({"no-such-key": 1})");
  EXPECT_EQ(run("two-qubit --config cli_bad.json").code, 3);
  write_file("cli_broken.json", "{ not json");
  EXPECT_EQ(run("two-qubit --config cli_broken.json").code, 3);
  write_file("cli_type.json", R"({"points": "many"})");
  EXPECT_EQ(run("superres --config cli_type.json").code, 3);
  EXPECT_EQ(run("two-qubit --config does_not_exist.json").code, 3);
}

TEST(Cli, SeedFromEnvironment) {
  CliRun seven = run("ancilla --x 0.3 --seed 7");
  CliRun env = run("ancilla --x 0.3", "QPS_SEED=7");
  CliRun other = run("ancilla --x 0.3", "QPS_SEED=9");
  CliRun flag = run("ancilla --x 0.3 --seed 7", "QPS_SEED=9");
  EXPECT_EQ(seven.out, env.out);
  EXPECT_NE(seven.out, other.out);
  EXPECT_EQ(seven.out, flag.out);
}

}  // namespace
