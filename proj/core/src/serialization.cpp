#include "uqd/serialization.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "uqd/estimators.hpp"

namespace uqd {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  return fields;
}

std::string join_floats(const std::vector<double>& values, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += sep;
    out += format_float17(values[i]);
  }
  return out;
}

struct ArchiveMeta {
  std::string kind;
  int genotype_dim = 0;
  int feature_dim = 0;
  GridSpec grid;
  std::size_t max_front_size = 6;
};

void write_occupant_row(std::ostream& out, std::size_t cell, std::size_t slot,
                        const SolutionRecord& record) {
  out << cell << ',' << slot << ',' << join_floats(record.genotype, ",") << ','
      << record.sample_count << ',' << format_float17(record.est_fitness) << ','
      << join_floats(record.est_features, ",") << ','
      << format_float17(record.est_reproducibility) << '\n';
}

void write_header(std::ostream& out, const ArchiveMeta& meta) {
  out << "# uqd-archive v1\n";
  out << "# kind " << meta.kind << '\n';
  out << "# genotype_dim " << meta.genotype_dim << '\n';
  out << "# feature_dim " << meta.feature_dim << '\n';
  out << "# grid_mins";
  for (double v : meta.grid.feature_mins) out << ' ' << format_float17(v);
  out << '\n';
  out << "# grid_maxs";
  for (double v : meta.grid.feature_maxs) out << ' ' << format_float17(v);
  out << '\n';
  out << "# cells_per_dim";
  for (int v : meta.grid.cells_per_dim) out << ' ' << v;
  out << '\n';
  out << "# depth " << meta.grid.depth << '\n';
  if (meta.kind == "pareto") out << "# max_front_size " << meta.max_front_size << '\n';
  out << "cell_index,slot";
  for (int g = 0; g < meta.genotype_dim; ++g) out << ",g" << g;
  out << ",sample_count,est_fitness";
  for (int d = 0; d < meta.feature_dim; ++d) out << ",feat" << d;
  out << ",est_reproducibility\n";
}

SolutionRecord parse_occupant_row(const std::vector<std::string>& fields,
                                  const ArchiveMeta& meta) {
  const std::size_t expect = 2 + static_cast<std::size_t>(meta.genotype_dim) + 2 +
                             static_cast<std::size_t>(meta.feature_dim) + 1;
  if (fields.size() != expect) {
    throw std::runtime_error("archive row has wrong field count");
  }
  SolutionRecord record;
  std::size_t at = 2;
  record.genotype.resize(static_cast<std::size_t>(meta.genotype_dim));
  for (auto& g : record.genotype) g = parse_float(fields[at++]);
  record.sample_count = static_cast<std::size_t>(std::stoull(fields[at++]));
  record.est_fitness = parse_float(fields[at++]);
  record.est_features.resize(static_cast<std::size_t>(meta.feature_dim));
  for (auto& f : record.est_features) f = parse_float(fields[at++]);
  record.est_reproducibility = parse_float(fields[at]);
  return record;
}

}  // namespace

std::string format_float17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

double parse_float(const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str()) throw std::runtime_error("cannot parse float: " + text);
  return value;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char byte : data) {
    hash ^= byte;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for digest: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fnv1a64(buffer.str());
}

std::string to_hex(std::uint64_t value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

void write_archive_csv(const std::filesystem::path& path, const ArchiveVariant& archive) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write archive file: " + path.string());
  ArchiveMeta meta;
  if (const auto* grid = std::get_if<Archive>(&archive)) {
    meta.kind = "grid";
    meta.grid = grid->spec();
    grid->for_each_occupant([&](std::size_t cell, std::size_t, const SolutionRecord& record) {
      meta.genotype_dim = static_cast<int>(record.genotype.size());
      meta.feature_dim = static_cast<int>(record.est_features.size());
      (void)cell;
    });
    if (meta.feature_dim == 0) meta.feature_dim = static_cast<int>(meta.grid.dims());
    if (meta.genotype_dim == 0) meta.genotype_dim = meta.feature_dim + 1;
    write_header(out, meta);
    grid->for_each_occupant([&](std::size_t cell, std::size_t slot, const SolutionRecord& record) {
      write_occupant_row(out, cell, slot, record);
    });
  } else {
    const auto& pareto = std::get<ParetoArchive>(archive);
    meta.kind = "pareto";
    meta.grid = pareto.spec();
    meta.max_front_size = pareto.max_front_size();
    for (std::size_t c = 0; c < pareto.total_cells() && meta.genotype_dim == 0; ++c) {
      if (!pareto.front(c).empty()) {
        meta.genotype_dim = static_cast<int>(pareto.front(c).front().genotype.size());
        meta.feature_dim = static_cast<int>(pareto.front(c).front().est_features.size());
      }
    }
    if (meta.feature_dim == 0) meta.feature_dim = static_cast<int>(meta.grid.dims());
    if (meta.genotype_dim == 0) meta.genotype_dim = meta.feature_dim + 1;
    write_header(out, meta);
    for (std::size_t c = 0; c < pareto.total_cells(); ++c) {
      const auto& front = pareto.front(c);
      for (std::size_t slot = 0; slot < front.size(); ++slot) {
        write_occupant_row(out, c, slot, front[slot]);
      }
    }
  }
}

ArchiveVariant read_archive_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open archive file: " + path.string());
  ArchiveMeta meta;
  std::string line;
  bool saw_header_row = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] != '#') {
      saw_header_row = true;
      break;
    }
    std::istringstream meta_line(line.substr(1));
    std::string key;
    meta_line >> key;
    if (key == "kind") {
      meta_line >> meta.kind;
    } else if (key == "genotype_dim") {
      meta_line >> meta.genotype_dim;
    } else if (key == "feature_dim") {
      meta_line >> meta.feature_dim;
    } else if (key == "grid_mins") {
      double v = 0.0;
      while (meta_line >> v) meta.grid.feature_mins.push_back(v);
    } else if (key == "grid_maxs") {
      double v = 0.0;
      while (meta_line >> v) meta.grid.feature_maxs.push_back(v);
    } else if (key == "cells_per_dim") {
      int v = 0;
      while (meta_line >> v) meta.grid.cells_per_dim.push_back(v);
    } else if (key == "depth") {
      meta_line >> meta.grid.depth;
    } else if (key == "max_front_size") {
      meta_line >> meta.max_front_size;
    }
  }
  if (!saw_header_row) throw std::runtime_error("archive file has no header row: " + path.string());
  if (meta.kind != "grid" && meta.kind != "pareto") {
    throw std::runtime_error("archive file has unknown kind: " + path.string());
  }

  ArchiveVariant archive = meta.kind == "grid"
                               ? ArchiveVariant(Archive(meta.grid))
                               : ArchiveVariant(ParetoArchive(meta.grid, meta.max_front_size));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    const std::size_t cell = static_cast<std::size_t>(std::stoull(fields[0]));
    SolutionRecord record = parse_occupant_row(fields, meta);
    if (auto* grid = std::get_if<Archive>(&archive)) {
      grid->cell_mutable(cell).push_back(std::move(record));
    } else {
      std::get<ParetoArchive>(archive).front_mutable(cell).push_back(std::move(record));
    }
  }
  return archive;
}

void write_samples_csv(const std::filesystem::path& path, const ArchiveVariant& archive) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write samples file: " + path.string());
  out << "# uqd-samples v1\n";
  std::size_t feature_dim = 0;
  auto visit_all = [&](auto&& fn) {
    if (const auto* grid = std::get_if<Archive>(&archive)) {
      grid->for_each_occupant(fn);
    } else {
      const auto& pareto = std::get<ParetoArchive>(archive);
      for (std::size_t c = 0; c < pareto.total_cells(); ++c) {
        const auto& front = pareto.front(c);
        for (std::size_t slot = 0; slot < front.size(); ++slot) fn(c, slot, front[slot]);
      }
    }
  };
  visit_all([&](std::size_t, std::size_t, const SolutionRecord& record) {
    if (!record.samples.empty()) feature_dim = record.samples.front().features.size();
  });
  out << "cell_index,slot,sample_index,fitness";
  for (std::size_t d = 0; d < feature_dim; ++d) out << ",feat" << d;
  out << '\n';
  visit_all([&](std::size_t cell, std::size_t slot, const SolutionRecord& record) {
    for (std::size_t s = 0; s < record.samples.size(); ++s) {
      out << cell << ',' << slot << ',' << s << ','
          << format_float17(record.samples[s].fitness) << ','
          << join_floats(record.samples[s].features, ",") << '\n';
    }
  });
}

void load_samples_csv(const std::filesystem::path& path, ArchiveVariant& archive,
                      const EstimatorConfig& estimators) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open samples file: " + path.string());
  std::string line;
  auto record_at = [&](std::size_t cell, std::size_t slot) -> SolutionRecord& {
    if (auto* grid = std::get_if<Archive>(&archive)) return grid->cell_mutable(cell)[slot];
    return std::get<ParetoArchive>(archive).front_mutable(cell)[slot];
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("cell_index", 0) == 0) continue;
    const auto fields = split(line, ',');
    if (fields.size() < 4) throw std::runtime_error("samples row has wrong field count");
    const std::size_t cell = static_cast<std::size_t>(std::stoull(fields[0]));
    const std::size_t slot = static_cast<std::size_t>(std::stoull(fields[1]));
    EvaluationSample sample;
    sample.fitness = parse_float(fields[3]);
    sample.features.reserve(fields.size() - 4);
    for (std::size_t i = 4; i < fields.size(); ++i) {
      sample.features.push_back(parse_float(fields[i]));
    }
    record_at(cell, slot).samples.push_back(std::move(sample));
  }
  auto refresh = [&](std::size_t cell, std::size_t slot) {
    SolutionRecord& record = record_at(cell, slot);
    if (!record.samples.empty()) update_estimates(record, estimators);
  };
  if (auto* grid = std::get_if<Archive>(&archive)) {
    for (std::size_t c = 0; c < grid->total_cells(); ++c) {
      for (std::size_t s = 0; s < grid->cell(c).size(); ++s) refresh(c, s);
    }
  } else {
    auto& pareto = std::get<ParetoArchive>(archive);
    for (std::size_t c = 0; c < pareto.total_cells(); ++c) {
      for (std::size_t s = 0; s < pareto.front(c).size(); ++s) refresh(c, s);
    }
  }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file: " + path.string());
  out << "generation,offspring_count,offspring_evals,reevaluation_evals,total_evals,"
         "cumulative_evals,occupancy,coverage,sum_est_fitness,mean_est_fitness,"
         "max_est_fitness,mean_est_reproducibility\n";
  for (const auto& row : trace) {
    out << row.generation << ',' << row.offspring_count << ',' << row.offspring_evals << ','
        << row.reevaluation_evals << ',' << (row.offspring_evals + row.reevaluation_evals) << ','
        << row.cumulative_evals << ',' << row.occupancy << ',' << format_float17(row.coverage)
        << ',' << format_float17(row.sum_est_fitness) << ','
        << format_float17(row.mean_est_fitness) << ',' << format_float17(row.max_est_fitness)
        << ',' << format_float17(row.mean_est_reproducibility) << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file: " + path.string());
  std::vector<TraceRow> trace;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 12) throw std::runtime_error("trace row has wrong field count");
    TraceRow row;
    row.generation = static_cast<std::size_t>(std::stoull(fields[0]));
    row.offspring_count = static_cast<std::size_t>(std::stoull(fields[1]));
    row.offspring_evals = static_cast<std::size_t>(std::stoull(fields[2]));
    row.reevaluation_evals = static_cast<std::size_t>(std::stoull(fields[3]));
    row.cumulative_evals = static_cast<std::size_t>(std::stoull(fields[5]));
    row.occupancy = static_cast<std::size_t>(std::stoull(fields[6]));
    row.coverage = parse_float(fields[7]);
    row.sum_est_fitness = parse_float(fields[8]);
    row.mean_est_fitness = parse_float(fields[9]);
    row.max_est_fitness = parse_float(fields[10]);
    row.mean_est_reproducibility = parse_float(fields[11]);
    trace.push_back(row);
  }
  return trace;
}

}  // namespace uqd
