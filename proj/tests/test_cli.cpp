// Copyright 2026 The adaptivek authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#ifndef ADAPTIVEK_CLI_PATH
#error "ADAPTIVEK_CLI_PATH must point at the CLI binary"
#endif

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args, const fs::path& workdir) {
  const fs::path log = workdir / "cmd_output.txt";
  const std::string cmd = std::string("\"") + ADAPTIVEK_CLI_PATH + "\" " + args + " > \"" +
                          log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CommandResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  res.output = ss.str();
  return res;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("adk_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  return lines;
}

double value_after(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size()));
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("theory --point-only prints the mse triple and writes nothing") {
  const fs::path dir = fresh_dir("theory_point");
  const CommandResult res = run_cli("theory --point-only --out \"" + (dir / "out").string() + "\"", dir);
  REQUIRE(res.exit_code == 0);
  const double sgd = value_after(res.output, "mse_sgd=");
  const double mkl = value_after(res.output, "mse_mkl=");
  const double adk = value_after(res.output, "mse_adk=");
  CHECK(adk < mkl);
  CHECK(mkl < sgd);
  CHECK(sgd == doctest::Approx(12.2));
  CHECK_FALSE(fs::exists(dir / "out" / "surface.csv"));
}

TEST_CASE("theory writes a surface with one row per grid point") {
  const fs::path dir = fresh_dir("theory_grid");
  const std::string args =
      "theory --mu2-min 2 --mu2-max 4 --mu2-step 1 --sigma2-min 1 --sigma2-max 2 "
      "--sigma2-step 0.5 --taus 0.2,0.4 --curves --out \"" + (dir / "out").string() + "\"";
  const CommandResult res = run_cli(args, dir);
  REQUIRE(res.exit_code == 0);
  const std::string surface = read_file(dir / "out" / "surface.csv");
  CHECK(count_lines(surface) == 1 + 3 * 3 * 2);
  CHECK(surface.rfind("mu1,sigma1,mu2,sigma2,tau,", 0) == 0);
  const std::string curves = read_file(dir / "out" / "pdf_curves.csv");
  CHECK(curves.rfind("x,f_D,f_MKL,f_adk", 0) == 0);
  CHECK(count_lines(curves) == 602);
}

TEST_CASE("unknown flags and malformed config keys exit with code 2") {
  const fs::path dir = fresh_dir("badflag");
  CHECK(run_cli("theory --no-such-flag", dir).exit_code == 2);

  const fs::path cfg = dir / "bad.ini";
  std::ofstream(cfg) << "[theory]\nnosuchkey=3\n";
  const CommandResult res = run_cli("theory --point-only --config \"" + cfg.string() + "\"", dir);
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("nosuchkey") != std::string::npos);
}

TEST_CASE("config files set values and flags override them") {
  const fs::path dir = fresh_dir("cfg");
  const fs::path cfg = dir / "run.ini";
  std::ofstream(cfg) << "[theory]\ntau=0.1\nmu2=3.0\n";
  const CommandResult from_cfg =
      run_cli("theory --point-only --config \"" + cfg.string() + "\"", dir);
  REQUIRE(from_cfg.exit_code == 0);
  CHECK(from_cfg.output.find("tau=0.1") != std::string::npos);
  CHECK(from_cfg.output.find("mu2=3") != std::string::npos);

  const CommandResult overridden =
      run_cli("theory --point-only --tau 0.3 --config \"" + cfg.string() + "\"", dir);
  REQUIRE(overridden.exit_code == 0);
  CHECK(overridden.output.find("tau=0.3") != std::string::npos);
}

TEST_CASE("simulate with the oracle selector reports a perfect summary") {
  const fs::path dir = fresh_dir("sim_oracle");
  const CommandResult res = run_cli(
      "simulate --selector oracle --batches 80 --batch-size 10 --out \"" + (dir / "out").string() +
          "\"",
      dir);
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("precision=1.000") != std::string::npos);
  CHECK(res.output.find("recall=1.000") != std::string::npos);
  const std::string csv = read_file(dir / "out" / "stream.csv");
  CHECK(count_lines(csv) == 81);
}

TEST_CASE("simulate with the fixed-k selector reproduces the order-statistics summary") {
  const fs::path dir = fresh_dir("sim_mkl");
  const CommandResult res = run_cli(
      "simulate --selector mkl --k 6 --batches 20000 --batch-size 10 --out \"" +
          (dir / "out").string() + "\"",
      dir);
  REQUIRE(res.exit_code == 0);
  // Long-run expectations for keep-6-of-10 on the default mixture, computed
  // from the rank distribution of a clean draw: precision 0.8904, recall
  // 0.9142.
  CHECK(std::abs(value_after(res.output, "precision=") - 0.890) < 0.01);
  CHECK(std::abs(value_after(res.output, "recall=") - 0.914) < 0.01);
  CHECK(std::abs(value_after(res.output, "selected_fraction=") - 0.6) < 1e-9);
}

TEST_CASE("train writes per-run traces plus a summary") {
  const fs::path dir = fresh_dir("train_small");
  const std::string args =
      "train --selectors vanilla,adaptive --tau 0.2 --seeds 2 --train-samples 300 "
      "--test-samples 100 --vanilla-epochs 2 --adaptive-epochs 3 --hidden 8 "
      "--format both --out \"" + (dir / "out").string() + "\"";
  const CommandResult res = run_cli(args, dir);
  REQUIRE(res.exit_code == 0);

  const std::string summary = read_file(dir / "out" / "summary.csv");
  CHECK(count_lines(summary) == 1 + 4);
  CHECK(summary.rfind("selector,tau,seed,max_test_acc,est_noise_ratio", 0) == 0);
  CHECK(fs::exists(dir / "out" / "trace_vanilla_tau0.2_seed1.csv"));
  CHECK(fs::exists(dir / "out" / "trace_vanilla_tau0.2_seed2.json"));
  CHECK(fs::exists(dir / "out" / "trace_adaptive_tau0.2_seed2.csv"));
  CHECK(fs::exists(dir / "out" / "trace_adaptive_tau0.2_seed1.json"));
}

TEST_CASE("identical train commands produce byte-identical outputs") {
  const fs::path dir = fresh_dir("train_repro");
  const std::string common =
      "train --selectors mkl --tau 0.3 --seeds 1 --train-samples 256 --test-samples 64 "
      "--vanilla-epochs 1 --adaptive-epochs 2 --hidden 8 --format both --seed 7 --out \"";
  REQUIRE(run_cli(common + (dir / "a").string() + "\"", dir).exit_code == 0);
  REQUIRE(run_cli(common + (dir / "b").string() + "\"", dir).exit_code == 0);
  CHECK(read_file(dir / "a" / "summary.csv") == read_file(dir / "b" / "summary.csv"));
  CHECK(read_file(dir / "a" / "trace_mkl_tau0.3_seed7.csv") ==
        read_file(dir / "b" / "trace_mkl_tau0.3_seed7.csv"));
  CHECK(read_file(dir / "a" / "trace_mkl_tau0.3_seed7.json") ==
        read_file(dir / "b" / "trace_mkl_tau0.3_seed7.json"));
  CHECK(!read_file(dir / "a" / "summary.csv").empty());
}

TEST_CASE("runtime failures exit with code 1") {
  const fs::path dir = fresh_dir("badout");
  // /dev/null/x can never be a directory.
  const CommandResult res = run_cli(
      "simulate --selector vanilla --batches 5 --batch-size 4 --out /dev/null/x", dir);
  CHECK(res.exit_code == 1);
}

TEST_SUITE_END();
