#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* path = std::getenv("UQD_CLI_PATH");
  REQUIRE(path != nullptr);
  return path;
}

// Runs the CLI through /bin/sh; `env_prefix` may carry VAR=value assignments.
int run_cli(const std::string& args, const std::string& env_prefix = "") {
  std::string command;
  if (!env_prefix.empty()) command += env_prefix + " ";
  command += "\"" + cli_path() + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "uqd_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return lines;
}

const std::string kQuickFlags = "--generations 3 --sampling-size 128 --fixed-samples 8";

std::string quick_run_args(const std::string& algorithm, int seed, const fs::path& out) {
  return "run --task linear --algorithm " + algorithm + " --seed " + std::to_string(seed) + " " +
         kQuickFlags + " --out \"" + out.string() + "\"";
}

}  // namespace

TEST_CASE("run command writes a run directory and reruns byte-identically") {
  const fs::path a = fresh_dir("run_a");
  const fs::path b = fresh_dir("run_b");
  REQUIRE(run_cli(quick_run_args("me_sampling", 3, a)) == 0);
  REQUIRE(run_cli(quick_run_args("me_sampling", 3, b)) == 0);

  for (const char* name : {"config.json", "archive.csv", "trace.csv", "manifest.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(a / name));
  }
  for (const char* name : {"config.json", "archive.csv", "trace.csv"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }

  SUBCASE("config file input with flag overrides") {
    const fs::path c = fresh_dir("run_c");
    const int code = run_cli("run --config \"" + (a / "config.json").string() +
                             "\" --seed 9 --out \"" + c.string() + "\"");
    CHECK(code == 0);
    CHECK(slurp(c / "config.json").find("\"seed\": 9") != std::string::npos);
  }

  SUBCASE("preference flags flow into the config") {
    const fs::path d = fresh_dir("run_d");
    const int code =
        run_cli(quick_run_args("me_delta", 3, d) + " --delta-f 0.125 --delta-r 0.25");
    CHECK(code == 0);
    const std::string config = slurp(d / "config.json");
    CHECK(config.find("\"delta_f\": 0.125") != std::string::npos);
    CHECK(config.find("\"delta_r\": 0.25") != std::string::npos);
  }
}

TEST_CASE("usage errors exit with status 2") {
  const fs::path out = fresh_dir("usage");
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run --out \"" + out.string() + "\"") == 2);
  CHECK(run_cli("run --task no_such_task --algorithm me_sampling " + kQuickFlags + " --out \"" +
                out.string() + "\"") == 2);
  CHECK(run_cli("run --task linear --algorithm no_such_algorithm " + kQuickFlags + " --out \"" +
                out.string() + "\"") == 2);
  CHECK(run_cli(quick_run_args("me_delta", 1, out) + " --delta-f 0.1") == 2);
  CHECK(run_cli(quick_run_args("me_delta", 1, out) + " --delta-r 0.1") == 2);
  CHECK(run_cli("project --run \"" + out.string() + "\" --delta-f 0.1 --out \"" + out.string() +
                "\"") == 2);

  // A campaign-shaped config without "kind" is read as a run config and must
  // be rejected as invalid rather than crash.
  const fs::path bad_config = out / "kindless.json";
  std::ofstream(bad_config, std::ios::binary)
      << "{\"tasks\": [\"linear\"], \"algorithms\": [\"vanilla_me\"], \"seeds\": [1]}";
  CHECK(run_cli("run --config \"" + bad_config.string() + "\"") == 2);
}

TEST_CASE("evaluate command emits metrics and rejects bad inputs") {
  const fs::path run_dir = fresh_dir("eval_run");
  REQUIRE(run_cli(quick_run_args("me_sampling", 5, run_dir)) == 0);

  const fs::path out = fresh_dir("eval_out");
  REQUIRE(run_cli("evaluate --run \"" + run_dir.string() + "\" --reevals 8 --out \"" +
                  out.string() + "\"") == 0);
  CHECK(fs::exists(out / "metrics.csv"));
  CHECK(fs::exists(out / "cells.csv"));
  CHECK(line_count(out / "metrics.csv") == 2);

  SUBCASE("missing run directory is an I/O failure") {
    const fs::path missing = fs::temp_directory_path() / "uqd_cli_tests" / "no_such_run";
    fs::remove_all(missing);
    CHECK(run_cli("evaluate --run \"" + missing.string() + "\" --reevals 8 --out \"" +
                  fresh_dir("eval_missing_out").string() + "\"") == 1);
  }

  SUBCASE("pareto runs must be projected first") {
    const fs::path pareto_dir = fresh_dir("eval_pareto");
    REQUIRE(run_cli(quick_run_args("mome_x", 1, pareto_dir)) == 0);
    CHECK(run_cli("evaluate --run \"" + pareto_dir.string() + "\" --reevals 8 --out \"" +
                  fresh_dir("eval_pareto_out").string() + "\"") == 2);
  }
}

TEST_CASE("project command converts pareto runs only") {
  const fs::path pareto_dir = fresh_dir("project_run");
  REQUIRE(run_cli(quick_run_args("mome_x", 2, pareto_dir)) == 0);

  const fs::path out = fresh_dir("project_out");
  REQUIRE(run_cli("project --run \"" + pareto_dir.string() + "\" --out \"" + out.string() +
                  "\"") == 0);
  CHECK(slurp(out / "config.json").find("\"kind\": \"projection\"") != std::string::npos);

  const fs::path eval_out = fresh_dir("project_eval");
  CHECK(run_cli("evaluate --run \"" + out.string() + "\" --reevals 8 --out \"" +
                eval_out.string() + "\"") == 0);
  CHECK(fs::exists(eval_out / "metrics.csv"));

  const fs::path grid_dir = fresh_dir("project_grid");
  REQUIRE(run_cli(quick_run_args("me_sampling", 2, grid_dir)) == 0);
  CHECK(run_cli("project --run \"" + grid_dir.string() + "\" --out \"" +
                fresh_dir("project_grid_out").string() + "\"") == 2);
}

TEST_CASE("UQD_OUTPUT_ROOT anchors relative output paths") {
  const fs::path root = fresh_dir("output_root");
  const std::string env = "UQD_OUTPUT_ROOT=\"" + root.string() + "\"";
  REQUIRE(run_cli("run --task linear --algorithm me_sampling --seed 1 " + kQuickFlags +
                  " --out anchored",
                  env) == 0);
  CHECK(fs::exists(root / "anchored" / "archive.csv"));

  // Absolute paths ignore the root.
  const fs::path absolute = fresh_dir("output_abs");
  REQUIRE(run_cli(quick_run_args("me_sampling", 1, absolute), env) == 0);
  CHECK(fs::exists(absolute / "archive.csv"));
  CHECK_FALSE(fs::exists(root / absolute.relative_path()));
}

TEST_CASE("campaign config runs end-to-end through run, evaluate, and report") {
  const fs::path base = fresh_dir("campaign");
  const fs::path campaign_out = base / "runs";
  std::ostringstream config;
  config << "{\n"
         << "  \"kind\": \"campaign\",\n"
         << "  \"tasks\": [\"linear\"],\n"
         << "  \"algorithms\": [\"vanilla_me\", \"me_ls\"],\n"
         << "  \"seeds\": [1, 2],\n"
         << "  \"sampling_size\": 64,\n"
         << "  \"generations\": 2,\n"
         << "  \"output_dir\": \"" << campaign_out.string() << "\"\n"
         << "}\n";
  const fs::path config_path = base / "campaign.json";
  std::ofstream(config_path, std::ios::binary) << config.str();

  REQUIRE(run_cli("run --config \"" + config_path.string() + "\"") == 0);
  const std::vector<std::string> expected = {"linear_vanilla_me_s1", "linear_vanilla_me_s2",
                                             "linear_me_ls_s1", "linear_me_ls_s2"};
  for (const auto& name : expected) {
    CAPTURE(name);
    REQUIRE(fs::exists(campaign_out / name / "archive.csv"));
  }

  std::string eval_args = "evaluate --reevals 8 --out \"" + (base / "evaluation").string() + "\"";
  for (const auto& name : expected) {
    eval_args += " --run \"" + (campaign_out / name).string() + "\"";
  }
  REQUIRE(run_cli(eval_args) == 0);
  CHECK(line_count(base / "evaluation" / "metrics.csv") == 5);

  REQUIRE(run_cli("report --metrics \"" + (base / "evaluation" / "metrics.csv").string() +
                  "\" --cells \"" + (base / "evaluation" / "cells.csv").string() + "\" --out \"" +
                  (base / "report").string() + "\"") == 0);
  CHECK(fs::exists(base / "report" / "box_data.csv"));
  CHECK(fs::exists(base / "report" / "significance.csv"));
  // Two algorithms on two shared seeds: every pair is reported but n=2 is
  // below the Wilcoxon minimum, so all rows are insufficient_n.
  const std::string significance = slurp(base / "report" / "significance.csv");
  CHECK(significance.find("insufficient_n") != std::string::npos);
  CHECK(significance.find(",ok") == std::string::npos);
  CHECK(line_count(base / "report" / "significance.csv") == 7);
}
