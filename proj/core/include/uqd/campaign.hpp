#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "uqd/algorithms.hpp"
#include "uqd/metrics.hpp"
#include "uqd/tasks.hpp"

namespace uqd {

inline constexpr const char* kCodeVersion = "uqd 0.1.0";

struct RunConfig {
  TaskSpec task;
  AlgorithmConfig algorithm;
  std::uint64_t seed = 0;
  bool write_samples = false;
};

std::string run_config_to_json_string(const RunConfig& config);
RunConfig run_config_from_json_string(const std::string& text);

// FNV-1a over the canonical sorted-key JSON dump, so the hash is stable
// under field reordering in hand-edited config files.
std::uint64_t config_hash(const RunConfig& config);

// Executes the experiment and writes archive.csv, trace.csv, config.json and
// manifest.json (plus samples.csv when requested) into out_dir. The manifest
// carries timestamps, so it is the one file exempt from byte-identical
// reruns; everything else is.
RunResult execute_run(const RunConfig& config, const std::filesystem::path& out_dir,
                      int workers = 1);

struct LoadedRun {
  std::filesystem::path dir;
  RunConfig config;
  ArchiveVariant archive;
  std::vector<TraceRow> trace;
};

LoadedRun load_run(const std::filesystem::path& run_dir);

// Reevaluates each run with its own seed (role separation keeps the streams
// disjoint from training) and emits metrics.csv + cells.csv into out_dir.
// The Reproducibility-Score is normalized across the whole call, so pass
// every run of a comparison together. Pareto runs must be projected first.
void evaluate_runs(const std::vector<std::filesystem::path>& run_dirs, std::size_t reevals,
                   const std::filesystem::path& out_dir, int workers = 1);

// Projects a mome_x run into a single-elite run directory. Preference
// defaults to the source run's resolved preference.
void project_run(const std::filesystem::path& run_dir,
                 const std::optional<DeltaPreference>& preference,
                 const std::filesystem::path& out_dir);

// Emits box_data.csv, significance.csv and per-run heatmap matrices from
// previously written metrics/cells CSVs.
void write_report(const std::vector<std::filesystem::path>& metrics_csvs,
                  const std::vector<std::filesystem::path>& cells_csvs,
                  const std::filesystem::path& out_dir);

struct CampaignConfig {
  std::vector<std::string> tasks;
  std::vector<AlgorithmConfig> algorithms;
  std::vector<std::uint64_t> seeds;
  std::size_t reevals = 512;
  std::string output_dir = "campaign";
  int parallelism = 1;
  bool write_samples = false;
};

void validate(const CampaignConfig& config);

CampaignConfig campaign_from_json_string(const std::string& text);
std::string campaign_to_json_string(const CampaignConfig& config);

// Task names may be builtin names or task-file paths.
TaskSpec resolve_task(const std::string& name_or_path);

// (task x algorithm x seed), tasks outermost, seeds innermost.
std::vector<RunConfig> expand_campaign(const CampaignConfig& config);

// Directory name for one expanded run: <task>_<algorithm>_s<seed>.
std::string run_directory_name(const RunConfig& config);

// "run" | "campaign" from a config file's kind field ("run" when absent).
std::string config_kind(const std::string& json_text);

}  // namespace uqd
