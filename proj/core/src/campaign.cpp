#include "uqd/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "uqd/estimators.hpp"
#include "uqd/serialization.hpp"
#include "uqd/stats.hpp"

namespace uqd {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kMetricColumns[] = {
    "coverage",           "corrected_qd_score", "reproducibility_score",
    "average_reproducibility", "average_fitness", "weighted_regret",
};

std::string iso8601_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  return fields;
}

json preference_to_json(const DeltaPreference& pref) {
  return json{{"delta_f", pref.delta_f}, {"delta_r", pref.delta_r}, {"rho", pref.rho}};
}

DeltaPreference preference_from_json(const json& doc) {
  DeltaPreference pref;
  pref.delta_f = doc.at("delta_f").get<double>();
  pref.delta_r = doc.at("delta_r").get<double>();
  pref.rho = doc.value("rho", 1e-9);
  return pref;
}

std::string mutation_operator_name(MutationConfig::Operator op) {
  return op == MutationConfig::Operator::IsoLine ? "iso_line" : "gaussian";
}

MutationConfig::Operator mutation_operator_from_string(const std::string& name) {
  if (name == "iso_line") return MutationConfig::Operator::IsoLine;
  if (name == "gaussian") return MutationConfig::Operator::Gaussian;
  throw std::invalid_argument("unknown mutation operator: " + name);
}

json algorithm_to_json(const AlgorithmConfig& cfg) {
  json doc;
  doc["name"] = to_string(cfg.algorithm);
  doc["sampling_size"] = cfg.sampling_size;
  doc["fixed_samples"] = cfg.fixed_samples;
  doc["as_initial_samples"] = cfg.as_initial_samples;
  doc["depth"] = cfg.depth;
  doc["generations"] = cfg.generations;
  if (cfg.preference) doc["preference"] = preference_to_json(*cfg.preference);
  doc["mutation"] = {
      {"operator", mutation_operator_name(cfg.mutation.op)},
      {"sigma_iso", cfg.mutation.sigma_iso},
      {"sigma_line", cfg.mutation.sigma_line},
  };
  doc["estimators"] = {
      {"performance", to_string(cfg.estimators.performance)},
      {"reproducibility", to_string(cfg.estimators.reproducibility)},
      {"feature", to_string(cfg.estimators.feature)},
  };
  doc["max_front_size"] = cfg.max_front_size;
  return doc;
}

AlgorithmConfig algorithm_from_json(const json& doc, AlgorithmConfig cfg = {}) {
  cfg.algorithm = algorithm_from_string(doc.at("name").get<std::string>());
  cfg.sampling_size = doc.value("sampling_size", cfg.sampling_size);
  cfg.fixed_samples = doc.value("fixed_samples", cfg.fixed_samples);
  cfg.as_initial_samples = doc.value("as_initial_samples", cfg.as_initial_samples);
  cfg.depth = doc.value("depth", cfg.depth);
  cfg.generations = doc.value("generations", cfg.generations);
  if (doc.contains("preference") && !doc.at("preference").is_null()) {
    cfg.preference = preference_from_json(doc.at("preference"));
  }
  if (doc.contains("mutation")) {
    const json& m = doc.at("mutation");
    cfg.mutation.op =
        mutation_operator_from_string(m.value("operator", mutation_operator_name(cfg.mutation.op)));
    cfg.mutation.sigma_iso = m.value("sigma_iso", cfg.mutation.sigma_iso);
    cfg.mutation.sigma_line = m.value("sigma_line", cfg.mutation.sigma_line);
  }
  if (doc.contains("estimators")) {
    const json& e = doc.at("estimators");
    cfg.estimators.performance = performance_estimator_from_string(
        e.value("performance", to_string(cfg.estimators.performance)));
    cfg.estimators.reproducibility = reproducibility_estimator_from_string(
        e.value("reproducibility", to_string(cfg.estimators.reproducibility)));
    cfg.estimators.feature =
        feature_estimator_from_string(e.value("feature", to_string(cfg.estimators.feature)));
  }
  cfg.max_front_size = doc.value("max_front_size", cfg.max_front_size);
  return cfg;
}

json run_config_to_json(const RunConfig& config) {
  json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "run";
  doc["task"] = json::parse(task_to_json_string(config.task));
  doc["algorithm"] = algorithm_to_json(config.algorithm);
  doc["seed"] = config.seed;
  doc["write_samples"] = config.write_samples;
  return doc;
}

RunConfig run_config_from_json(const json& doc) {
  if (doc.value("schema_version", 1) != 1) {
    throw std::runtime_error("unsupported config schema_version");
  }
  RunConfig config;
  config.task = task_from_json_string(doc.at("task").dump());
  config.algorithm = algorithm_from_json(doc.at("algorithm"));
  config.seed = doc.at("seed").get<std::uint64_t>();
  config.write_samples = doc.value("write_samples", false);
  return config;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_manifest(const fs::path& dir, const std::string& kind, std::uint64_t cfg_hash,
                    const std::string& started, const std::string& finished,
                    std::size_t generations, std::size_t offspring_evals,
                    std::size_t reevaluation_evals, std::vector<std::string> files) {
  std::sort(files.begin(), files.end());
  json doc;
  doc["schema_version"] = 1;
  doc["kind"] = kind;
  doc["config_hash"] = to_hex(cfg_hash);
  doc["code_version"] = kCodeVersion;
  doc["started_at"] = started;
  doc["finished_at"] = finished;
  doc["ledger"] = {
      {"generations", generations},
      {"offspring_evals", offspring_evals},
      {"reevaluation_evals", reevaluation_evals},
      {"total_evals", offspring_evals + reevaluation_evals},
  };
  json inventory = json::array();
  for (const auto& name : files) {
    const fs::path path = dir / name;
    inventory.push_back({
        {"name", name},
        {"fnv1a64", to_hex(fnv1a64_file(path))},
        {"bytes", static_cast<std::uint64_t>(fs::file_size(path))},
    });
  }
  doc["files"] = inventory;
  write_text_file(dir / "manifest.json", doc.dump(2) + "\n");
}

struct TraceTotals {
  std::size_t offspring_evals = 0;
  std::size_t reevaluation_evals = 0;
};

TraceTotals trace_totals(const std::vector<TraceRow>& trace) {
  TraceTotals totals;
  for (const auto& row : trace) {
    totals.offspring_evals += row.offspring_evals;
    totals.reevaluation_evals += row.reevaluation_evals;
  }
  return totals;
}

std::string metric_value_text(double value) { return format_float17(value); }

struct MetricsRow {
  std::string task;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::map<std::string, double> values;
};

std::vector<MetricsRow> read_metrics_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file: " + path.string());
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = split(line, ',');
    break;
  }
  if (header.empty()) throw std::runtime_error("metrics file has no header: " + path.string());
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  for (const char* required : {"task", "algorithm", "seed"}) {
    if (!column.count(required)) {
      throw std::runtime_error(std::string("metrics file missing column: ") + required);
    }
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw std::runtime_error("metrics row has wrong field count: " + path.string());
    }
    MetricsRow row;
    row.task = fields[column["task"]];
    row.algorithm = fields[column["algorithm"]];
    row.seed = std::stoull(fields[column["seed"]]);
    for (const char* metric : kMetricColumns) {
      const auto it = column.find(metric);
      if (it != column.end()) row.values[metric] = parse_float(fields[it->second]);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct CellsFile {
  std::vector<int> cells_per_dim;
  struct Row {
    std::string task;
    std::string algorithm;
    std::uint64_t seed = 0;
    std::vector<int> cell;
    double corrected_fitness = 0.0;
    double reproducibility = 0.0;
  };
  std::vector<Row> rows;
};

CellsFile read_cells_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cells file: " + path.string());
  CellsFile file;
  std::string line;
  std::size_t header_fields = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string key;
      meta >> key;
      if (key == "cells_per_dim") {
        int v = 0;
        while (meta >> v) file.cells_per_dim.push_back(v);
      }
      continue;
    }
    header_fields = split(line, ',').size();
    break;
  }
  if (header_fields == 0) throw std::runtime_error("cells file has no header: " + path.string());
  const std::size_t dims = file.cells_per_dim.size();
  if (header_fields != dims + 5) {
    throw std::runtime_error("cells file header does not match cells_per_dim: " + path.string());
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header_fields) {
      throw std::runtime_error("cells row has wrong field count: " + path.string());
    }
    CellsFile::Row row;
    row.task = fields[0];
    row.algorithm = fields[1];
    row.seed = std::stoull(fields[2]);
    for (std::size_t d = 0; d < dims; ++d) row.cell.push_back(std::stoi(fields[3 + d]));
    row.corrected_fitness = parse_float(fields[3 + dims]);
    row.reproducibility = parse_float(fields[4 + dims]);
    file.rows.push_back(std::move(row));
  }
  return file;
}

void write_heatmaps(const CellsFile& file, const fs::path& out_dir) {
  if (file.cells_per_dim.size() != 2) return;
  const int nx = file.cells_per_dim[0];
  const int ny = file.cells_per_dim[1];
  std::map<std::tuple<std::string, std::string, std::uint64_t>, std::vector<const CellsFile::Row*>>
      groups;
  for (const auto& row : file.rows) {
    groups[{row.task, row.algorithm, row.seed}].push_back(&row);
  }
  const double nan = std::nan("");
  for (const auto& [key, rows] : groups) {
    const auto& [task, algorithm, seed] = key;
    std::vector<double> fitness(static_cast<std::size_t>(nx) * ny, nan);
    std::vector<double> reproducibility(static_cast<std::size_t>(nx) * ny, nan);
    for (const auto* row : rows) {
      const std::size_t at =
          static_cast<std::size_t>(row->cell[1]) * nx + static_cast<std::size_t>(row->cell[0]);
      fitness[at] = row->corrected_fitness;
      reproducibility[at] = row->reproducibility;
    }
    const std::string stem =
        "heatmap_" + task + "_" + algorithm + "_s" + std::to_string(seed) + "_";
    for (const auto& [suffix, matrix] :
         {std::pair<std::string, const std::vector<double>*>{"fitness", &fitness},
          {"reproducibility", &reproducibility}}) {
      std::ofstream out(out_dir / (stem + suffix + ".csv"), std::ios::binary);
      for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
          if (x > 0) out << ',';
          out << format_float17((*matrix)[static_cast<std::size_t>(y) * nx + x]);
        }
        out << '\n';
      }
    }
  }
}

}  // namespace

std::string run_config_to_json_string(const RunConfig& config) {
  return run_config_to_json(config).dump(2);
}

RunConfig run_config_from_json_string(const std::string& text) {
  return run_config_from_json(json::parse(text));
}

std::uint64_t config_hash(const RunConfig& config) {
  return fnv1a64(run_config_to_json(config).dump());
}

RunResult execute_run(const RunConfig& config, const std::filesystem::path& out_dir, int workers) {
  validate(config.task);
  validate(config.algorithm, config.task);
  const std::string started = iso8601_now();
  fs::create_directories(out_dir);
  RunResult result = run_experiment(config.task, config.algorithm, config.seed, workers);
  write_text_file(out_dir / "config.json", run_config_to_json(config).dump(2) + "\n");
  write_archive_csv(out_dir / "archive.csv", result.archive);
  write_trace_csv(out_dir / "trace.csv", result.trace);
  std::vector<std::string> files = {"archive.csv", "config.json", "trace.csv"};
  if (config.write_samples) {
    write_samples_csv(out_dir / "samples.csv", result.archive);
    files.push_back("samples.csv");
  }
  const TraceTotals totals = trace_totals(result.trace);
  write_manifest(out_dir, "run", config_hash(config), started, iso8601_now(),
                 result.ledger.rows.size(), totals.offspring_evals, totals.reevaluation_evals,
                 std::move(files));
  return result;
}

LoadedRun load_run(const std::filesystem::path& run_dir) {
  LoadedRun run;
  run.dir = run_dir;
  const fs::path config_path = run_dir / "config.json";
  if (!fs::exists(config_path)) {
    throw std::runtime_error("run directory missing config.json: " + run_dir.string());
  }
  run.config = run_config_from_json_string(read_text_file(config_path));
  const fs::path archive_path = run_dir / "archive.csv";
  if (!fs::exists(archive_path)) {
    throw std::runtime_error("run directory missing archive.csv: " + run_dir.string());
  }
  run.archive = read_archive_csv(archive_path);
  const fs::path trace_path = run_dir / "trace.csv";
  if (fs::exists(trace_path)) run.trace = read_trace_csv(trace_path);
  return run;
}

void evaluate_runs(const std::vector<std::filesystem::path>& run_dirs, std::size_t reevals,
                   const std::filesystem::path& out_dir, int workers) {
  if (run_dirs.empty()) throw std::invalid_argument("evaluate requires at least one run");
  std::vector<LoadedRun> runs;
  runs.reserve(run_dirs.size());
  for (const auto& dir : run_dirs) {
    LoadedRun run = load_run(dir);
    if (std::holds_alternative<ParetoArchive>(run.archive)) {
      throw std::invalid_argument("pareto run must be projected before evaluate: " + dir.string());
    }
    runs.push_back(std::move(run));
  }
  const GridSpec& first_grid = std::get<Archive>(runs.front().archive).spec();
  for (const auto& run : runs) {
    const GridSpec& grid = std::get<Archive>(run.archive).spec();
    if (grid.cells_per_dim != first_grid.cells_per_dim ||
        grid.feature_mins != first_grid.feature_mins ||
        grid.feature_maxs != first_grid.feature_maxs) {
      throw std::invalid_argument("evaluate requires matching grids across runs");
    }
  }

  std::vector<ReevaluationDataset> datasets;
  datasets.reserve(runs.size());
  for (const auto& run : runs) {
    datasets.push_back(reevaluate_archive(std::get<Archive>(run.archive), run.config.task,
                                          reevals, run.config.seed, workers));
  }
  std::vector<const ReevaluationDataset*> pool;
  pool.reserve(datasets.size());
  for (const auto& dataset : datasets) pool.push_back(&dataset);
  const std::vector<double> rep_scores = reproducibility_score(pool);

  fs::create_directories(out_dir);
  std::ofstream metrics_out(out_dir / "metrics.csv", std::ios::binary);
  if (!metrics_out) throw std::runtime_error("cannot write metrics.csv");
  metrics_out << "task,algorithm,seed,preference_delta_f,preference_delta_r,reevals,"
                 "coverage,corrected_qd_score,reproducibility_score,average_reproducibility,"
                 "average_fitness,weighted_regret\n";

  std::ofstream cells_out(out_dir / "cells.csv", std::ios::binary);
  if (!cells_out) throw std::runtime_error("cannot write cells.csv");
  cells_out << "# cells_per_dim";
  for (int n : first_grid.cells_per_dim) cells_out << ' ' << n;
  cells_out << '\n';
  const std::size_t dims = first_grid.dims();
  cells_out << "task,algorithm,seed";
  if (dims == 2) {
    cells_out << ",cell_x,cell_y";
  } else {
    for (std::size_t d = 0; d < dims; ++d) cells_out << ",cell_" << d;
  }
  cells_out << ",corrected_fitness,reproducibility\n";

  for (std::size_t i = 0; i < runs.size(); ++i) {
    const LoadedRun& run = runs[i];
    const TaskSpec& task = run.config.task;
    const CorrectedArchive ca = corrected_archive(datasets[i], task.grid);
    const DeltaPreference pref = resolve_preference(run.config.algorithm, task);
    const double coverage =
        static_cast<double>(ca.filled) / static_cast<double>(ca.grid.total_cells());
    const std::string algorithm = to_string(run.config.algorithm.algorithm);

    metrics_out << task.name << ',' << algorithm << ',' << run.config.seed << ','
                << format_float17(pref.delta_f) << ',' << format_float17(pref.delta_r) << ','
                << reevals << ',' << format_float17(coverage) << ','
                << format_float17(corrected_qd_score(ca, task.fitness_range.first)) << ','
                << format_float17(rep_scores[i]) << ','
                << format_float17(average_reproducibility(datasets[i], task.sigma_max())) << ','
                << format_float17(average_fitness(ca)) << ','
                << format_float17(weighted_regret(ca, task, pref)) << '\n';

    for (std::size_t flat = 0; flat < ca.cells.size(); ++flat) {
      if (!ca.cells[flat]) continue;
      const CorrectedSolution& solution = *ca.cells[flat];
      const std::vector<int> index = unflatten_cell_index(flat, ca.grid);
      cells_out << task.name << ',' << algorithm << ',' << run.config.seed;
      for (int v : index) cells_out << ',' << v;
      cells_out << ',' << format_float17(solution.fitness) << ','
                << format_float17(solution.reproducibility) << '\n';
    }
  }
}

void project_run(const std::filesystem::path& run_dir,
                 const std::optional<DeltaPreference>& preference,
                 const std::filesystem::path& out_dir) {
  const std::string started = iso8601_now();
  LoadedRun run = load_run(run_dir);
  const auto* pareto = std::get_if<ParetoArchive>(&run.archive);
  if (!pareto) {
    throw std::invalid_argument("project requires a pareto (mome_x) run: " + run_dir.string());
  }
  const DeltaPreference pref =
      preference.value_or(resolve_preference(run.config.algorithm, run.config.task));
  Archive projected = project_pareto_archive(*pareto, pref);

  fs::create_directories(out_dir);
  RunConfig out_config = run.config;
  out_config.algorithm.preference = pref;
  json doc = run_config_to_json(out_config);
  doc["kind"] = "projection";
  doc["source_run"] = run_dir.string();
  write_text_file(out_dir / "config.json", doc.dump(2) + "\n");
  write_archive_csv(out_dir / "archive.csv", ArchiveVariant(std::move(projected)));
  write_trace_csv(out_dir / "trace.csv", run.trace);
  const TraceTotals totals = trace_totals(run.trace);
  write_manifest(out_dir, "projection", fnv1a64(doc.dump()), started, iso8601_now(),
                 run.trace.size(), totals.offspring_evals, totals.reevaluation_evals,
                 {"archive.csv", "config.json", "trace.csv"});
}

void write_report(const std::vector<std::filesystem::path>& metrics_csvs,
                  const std::vector<std::filesystem::path>& cells_csvs,
                  const std::filesystem::path& out_dir) {
  fs::create_directories(out_dir);

  std::vector<MetricsRow> rows;
  for (const auto& path : metrics_csvs) {
    auto file_rows = read_metrics_csv(path);
    rows.insert(rows.end(), std::make_move_iterator(file_rows.begin()),
                std::make_move_iterator(file_rows.end()));
  }

  std::ofstream box_out(out_dir / "box_data.csv", std::ios::binary);
  if (!box_out) throw std::runtime_error("cannot write box_data.csv");
  box_out << "task,algorithm,metric,seed,value\n";
  for (const auto& row : rows) {
    for (const char* metric : kMetricColumns) {
      const auto it = row.values.find(metric);
      if (it == row.values.end()) continue;
      box_out << row.task << ',' << row.algorithm << ',' << metric << ',' << row.seed << ','
              << metric_value_text(it->second) << '\n';
    }
  }

  // task -> metric -> algorithm -> seed -> value
  std::map<std::string, std::map<std::string, std::map<std::string, std::map<std::uint64_t, double>>>>
      by_task;
  for (const auto& row : rows) {
    for (const auto& [metric, value] : row.values) {
      by_task[row.task][metric][row.algorithm][row.seed] = value;
    }
  }

  struct SignificanceRow {
    std::string task;
    std::string metric;
    std::string algorithm_a;
    std::string algorithm_b;
    std::size_t n = 0;
    double p_value = std::nan("");
    double p_holm = std::nan("");
    bool sufficient = false;
  };
  std::vector<SignificanceRow> table;
  for (const auto& [task, metrics] : by_task) {
    for (const char* metric : kMetricColumns) {
      const auto metric_it = metrics.find(metric);
      if (metric_it == metrics.end()) continue;
      const auto& algorithms = metric_it->second;
      std::vector<std::size_t> family;
      std::vector<double> family_p;
      for (auto a = algorithms.begin(); a != algorithms.end(); ++a) {
        for (auto b = std::next(a); b != algorithms.end(); ++b) {
          SignificanceRow row;
          row.task = task;
          row.metric = metric;
          row.algorithm_a = a->first;
          row.algorithm_b = b->first;
          std::vector<double> values_a;
          std::vector<double> values_b;
          for (const auto& [seed, value] : a->second) {
            const auto shared = b->second.find(seed);
            if (shared == b->second.end()) continue;
            values_a.push_back(value);
            values_b.push_back(shared->second);
          }
          row.n = values_a.size();
          if (row.n >= 5) {
            row.p_value = wilcoxon_signed_rank(values_a, values_b);
            row.sufficient = true;
            family.push_back(table.size());
            family_p.push_back(row.p_value);
          }
          table.push_back(std::move(row));
        }
      }
      if (!family.empty()) {
        const std::vector<double> adjusted = holm_bonferroni(family_p);
        for (std::size_t k = 0; k < family.size(); ++k) table[family[k]].p_holm = adjusted[k];
      }
    }
  }

  std::ofstream sig_out(out_dir / "significance.csv", std::ios::binary);
  if (!sig_out) throw std::runtime_error("cannot write significance.csv");
  sig_out << "task,metric,algorithm_a,algorithm_b,n,p_value,p_holm,status\n";
  for (const auto& row : table) {
    sig_out << row.task << ',' << row.metric << ',' << row.algorithm_a << ',' << row.algorithm_b
            << ',' << row.n << ',' << format_float17(row.p_value) << ','
            << format_float17(row.p_holm) << ',' << (row.sufficient ? "ok" : "insufficient_n")
            << '\n';
  }

  for (const auto& path : cells_csvs) {
    write_heatmaps(read_cells_csv(path), out_dir);
  }
}

void validate(const CampaignConfig& config) {
  if (config.tasks.empty()) throw std::invalid_argument("campaign requires at least one task");
  if (config.algorithms.empty()) {
    throw std::invalid_argument("campaign requires at least one algorithm");
  }
  if (config.seeds.empty()) throw std::invalid_argument("campaign requires at least one seed");
  if (config.reevals < 2) throw std::invalid_argument("campaign reevals must be >= 2");
  if (config.parallelism < 1) throw std::invalid_argument("campaign parallelism must be >= 1");
}

CampaignConfig campaign_from_json_string(const std::string& text) {
  const json doc = json::parse(text);
  if (doc.value("schema_version", 1) != 1) {
    throw std::runtime_error("unsupported config schema_version");
  }
  CampaignConfig config;
  config.tasks = doc.at("tasks").get<std::vector<std::string>>();

  AlgorithmConfig base;
  base.sampling_size = doc.value("sampling_size", std::size_t{16384});
  base.generations = doc.value("generations", std::size_t{250});
  for (const json& entry : doc.at("algorithms")) {
    if (entry.is_string()) {
      AlgorithmConfig cfg = base;
      cfg.algorithm = algorithm_from_string(entry.get<std::string>());
      config.algorithms.push_back(cfg);
    } else {
      config.algorithms.push_back(algorithm_from_json(entry, base));
    }
  }

  if (doc.contains("seeds")) {
    config.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
  } else {
    for (std::uint64_t s = 1; s <= 10; ++s) config.seeds.push_back(s);
  }
  config.reevals = doc.value("reevals", std::size_t{512});
  config.output_dir = doc.value("output_dir", std::string("campaign"));
  config.parallelism = doc.value("parallelism", 1);
  config.write_samples = doc.value("write_samples", false);
  validate(config);
  return config;
}

std::string campaign_to_json_string(const CampaignConfig& config) {
  json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "campaign";
  doc["tasks"] = config.tasks;
  json algorithms = json::array();
  for (const auto& cfg : config.algorithms) algorithms.push_back(algorithm_to_json(cfg));
  doc["algorithms"] = algorithms;
  doc["seeds"] = config.seeds;
  doc["reevals"] = config.reevals;
  doc["output_dir"] = config.output_dir;
  doc["parallelism"] = config.parallelism;
  doc["write_samples"] = config.write_samples;
  return doc.dump(2);
}

TaskSpec resolve_task(const std::string& name_or_path) {
  const auto& names = builtin_task_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    return builtin_task(name_or_path);
  }
  if (fs::exists(name_or_path)) return load_task_file(name_or_path);
  throw std::invalid_argument("unknown task (not a builtin name or task file): " + name_or_path);
}

std::vector<RunConfig> expand_campaign(const CampaignConfig& config) {
  validate(config);
  std::vector<RunConfig> runs;
  runs.reserve(config.tasks.size() * config.algorithms.size() * config.seeds.size());
  for (const auto& task_name : config.tasks) {
    const TaskSpec task = resolve_task(task_name);
    for (const auto& algorithm : config.algorithms) {
      for (const std::uint64_t seed : config.seeds) {
        RunConfig run;
        run.task = task;
        run.algorithm = algorithm;
        run.seed = seed;
        run.write_samples = config.write_samples;
        runs.push_back(std::move(run));
      }
    }
  }
  return runs;
}

std::string run_directory_name(const RunConfig& config) {
  return config.task.name + "_" + to_string(config.algorithm.algorithm) + "_s" +
         std::to_string(config.seed);
}

std::string config_kind(const std::string& json_text) {
  return json::parse(json_text).value("kind", "run");
}

}  // namespace uqd
