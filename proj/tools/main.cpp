#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "uqd/campaign.hpp"

namespace fs = std::filesystem;

namespace {

fs::path resolve_out(const std::string& out) {
  fs::path path(out);
  if (path.is_absolute()) return path;
  if (const char* root = std::getenv("UQD_OUTPUT_ROOT"); root != nullptr && *root != '\0') {
    return fs::path(root) / path;
  }
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct RunFlags {
  std::string config_path;
  std::string task;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::size_t generations = 0;
  std::size_t sampling_size = 0;
  std::size_t fixed_samples = 0;
  std::size_t as_initial_samples = 0;
  int depth = 0;
  double delta_f = 0.0;
  double delta_r = 0.0;
  bool write_samples = false;
  std::string out;
  int workers = 1;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* generations_opt = nullptr;
  CLI::Option* sampling_opt = nullptr;
  CLI::Option* fixed_samples_opt = nullptr;
  CLI::Option* as_initial_opt = nullptr;
  CLI::Option* depth_opt = nullptr;
  CLI::Option* delta_f_opt = nullptr;
  CLI::Option* task_opt = nullptr;
  CLI::Option* algorithm_opt = nullptr;
};

void apply_run_flags(uqd::RunConfig& config, const RunFlags& flags) {
  if (flags.task_opt->count() > 0) config.task = uqd::resolve_task(flags.task);
  if (flags.algorithm_opt->count() > 0) {
    config.algorithm.algorithm = uqd::algorithm_from_string(flags.algorithm);
  }
  if (flags.seed_opt->count() > 0) config.seed = flags.seed;
  if (flags.generations_opt->count() > 0) config.algorithm.generations = flags.generations;
  if (flags.sampling_opt->count() > 0) config.algorithm.sampling_size = flags.sampling_size;
  if (flags.fixed_samples_opt->count() > 0) config.algorithm.fixed_samples = flags.fixed_samples;
  if (flags.as_initial_opt->count() > 0) {
    config.algorithm.as_initial_samples = flags.as_initial_samples;
  }
  if (flags.depth_opt->count() > 0) config.algorithm.depth = flags.depth;
  if (flags.delta_f_opt->count() > 0) {
    config.algorithm.preference = uqd::DeltaPreference{flags.delta_f, flags.delta_r, 1e-9};
  }
  if (flags.write_samples) config.write_samples = true;
}

int run_command(const RunFlags& flags) {
  if (!flags.config_path.empty()) {
    const std::string text = read_file(flags.config_path);
    std::string kind;
    std::optional<uqd::CampaignConfig> campaign;
    std::optional<uqd::RunConfig> run_config;
    try {
      kind = uqd::config_kind(text);
      if (kind == "campaign") {
        campaign = uqd::campaign_from_json_string(text);
      } else if (kind == "run") {
        run_config = uqd::run_config_from_json_string(text);
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw std::invalid_argument("invalid config " + flags.config_path + ": " + e.what());
    }
    if (campaign) {
      if (!flags.out.empty()) campaign->output_dir = flags.out;
      const int workers = flags.workers > 1 ? flags.workers : campaign->parallelism;
      const fs::path root = resolve_out(campaign->output_dir);
      for (const uqd::RunConfig& run : uqd::expand_campaign(*campaign)) {
        const fs::path dir = root / uqd::run_directory_name(run);
        uqd::execute_run(run, dir, workers);
        std::cout << "run written to " << dir.string() << '\n';
      }
      return 0;
    }
    if (!run_config) {
      throw std::invalid_argument("config kind must be 'run' or 'campaign', got '" + kind + "'");
    }
    uqd::RunConfig config = std::move(*run_config);
    apply_run_flags(config, flags);
    const fs::path dir =
        resolve_out(flags.out.empty() ? uqd::run_directory_name(config) : flags.out);
    uqd::execute_run(config, dir, flags.workers);
    std::cout << "run written to " << dir.string() << '\n';
    return 0;
  }

  if (flags.task_opt->count() == 0 || flags.algorithm_opt->count() == 0) {
    throw std::invalid_argument("run requires --config or both --task and --algorithm");
  }
  uqd::RunConfig config;
  config.task = uqd::resolve_task(flags.task);
  config.algorithm.algorithm = uqd::algorithm_from_string(flags.algorithm);
  apply_run_flags(config, flags);
  const fs::path dir = resolve_out(flags.out.empty() ? uqd::run_directory_name(config) : flags.out);
  uqd::execute_run(config, dir, flags.workers);
  std::cout << "run written to " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uqd: quality-diversity optimization in uncertain domains"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "Execute one run or a campaign config");
  run_cmd->add_option("--config", run_flags.config_path, "Run or campaign config JSON");
  run_flags.task_opt =
      run_cmd->add_option("--task", run_flags.task, "Builtin task name or task file");
  run_flags.algorithm_opt =
      run_cmd->add_option("--algorithm", run_flags.algorithm, "Algorithm name");
  run_flags.seed_opt = run_cmd->add_option("--seed", run_flags.seed, "Run seed");
  run_flags.generations_opt =
      run_cmd->add_option("--generations", run_flags.generations, "Generations");
  run_flags.sampling_opt =
      run_cmd->add_option("--sampling-size", run_flags.sampling_size, "Per-generation budget");
  run_flags.fixed_samples_opt = run_cmd->add_option("--fixed-samples", run_flags.fixed_samples,
                                                    "Samples per offspring (fixed-sampling)");
  run_flags.as_initial_opt = run_cmd->add_option(
      "--as-initial-samples", run_flags.as_initial_samples, "Initial samples (archive-sampling)");
  run_flags.depth_opt = run_cmd->add_option("--depth", run_flags.depth, "Cell depth");
  run_flags.delta_f_opt =
      run_cmd->add_option("--delta-f", run_flags.delta_f, "Preference delta_f");
  CLI::Option* delta_r_opt =
      run_cmd->add_option("--delta-r", run_flags.delta_r, "Preference delta_r");
  run_flags.delta_f_opt->needs(delta_r_opt);
  delta_r_opt->needs(run_flags.delta_f_opt);
  run_cmd->add_flag("--write-samples", run_flags.write_samples, "Also write samples.csv");
  run_cmd->add_option("--out", run_flags.out, "Output directory");
  run_cmd->add_option("--workers", run_flags.workers, "Evaluation threads");

  std::vector<std::string> eval_runs;
  std::size_t reevals = 512;
  std::string eval_out = "evaluation";
  int eval_workers = 1;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Reevaluate runs and emit metric CSVs");
  eval_cmd->add_option("--run", eval_runs, "Run directory (repeatable)")->required();
  eval_cmd->add_option("--reevals", reevals, "Reevaluations per solution");
  eval_cmd->add_option("--out", eval_out, "Output directory");
  eval_cmd->add_option("--workers", eval_workers, "Evaluation threads");

  std::string project_run_dir;
  double project_delta_f = 0.0;
  double project_delta_r = 0.0;
  std::string project_out = "projection";
  CLI::App* project_cmd =
      app.add_subcommand("project", "Project a mome_x run into a single-elite archive");
  project_cmd->add_option("--run", project_run_dir, "mome_x run directory")->required();
  CLI::Option* pdf = project_cmd->add_option("--delta-f", project_delta_f, "Preference delta_f");
  CLI::Option* pdr = project_cmd->add_option("--delta-r", project_delta_r, "Preference delta_r");
  pdf->needs(pdr);
  pdr->needs(pdf);
  project_cmd->add_option("--out", project_out, "Output directory");

  std::vector<std::string> report_metrics;
  std::vector<std::string> report_cells;
  std::string report_out = "report";
  CLI::App* report_cmd = app.add_subcommand("report", "Emit plot data and significance table");
  report_cmd->add_option("--metrics", report_metrics, "metrics.csv path (repeatable)")->required();
  report_cmd->add_option("--cells", report_cells, "cells.csv path (repeatable)");
  report_cmd->add_option("--out", report_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) return run_command(run_flags);
    if (eval_cmd->parsed()) {
      std::vector<fs::path> dirs(eval_runs.begin(), eval_runs.end());
      uqd::evaluate_runs(dirs, reevals, resolve_out(eval_out), eval_workers);
      std::cout << "metrics written to " << resolve_out(eval_out).string() << '\n';
      return 0;
    }
    if (project_cmd->parsed()) {
      std::optional<uqd::DeltaPreference> pref;
      if (pdf->count() > 0) pref = uqd::DeltaPreference{project_delta_f, project_delta_r, 1e-9};
      uqd::project_run(project_run_dir, pref, resolve_out(project_out));
      std::cout << "projection written to " << resolve_out(project_out).string() << '\n';
      return 0;
    }
    if (report_cmd->parsed()) {
      std::vector<fs::path> metrics(report_metrics.begin(), report_metrics.end());
      std::vector<fs::path> cells(report_cells.begin(), report_cells.end());
      uqd::write_report(metrics, cells, resolve_out(report_out));
      std::cout << "report written to " << resolve_out(report_out).string() << '\n';
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
