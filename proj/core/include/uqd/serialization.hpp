#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "uqd/algorithms.hpp"
#include "uqd/pareto.hpp"

namespace uqd {

// Shortest exact decimal: 17 significant digits round-trip any double.
std::string format_float17(double value);
double parse_float(const std::string& text);

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);

// Line-delimited occupant records with # metadata lines and a CSV header:
// cell_index, slot, genotype, sample_count, est_fitness, est_features,
// est_reproducibility. Round-trips bit-exactly.
void write_archive_csv(const std::filesystem::path& path, const ArchiveVariant& archive);
ArchiveVariant read_archive_csv(const std::filesystem::path& path);

// Optional sidecar with full sample histories:
// cell_index, slot, sample_index, fitness, features.
void write_samples_csv(const std::filesystem::path& path, const ArchiveVariant& archive);
void load_samples_csv(const std::filesystem::path& path, ArchiveVariant& archive,
                      const EstimatorConfig& estimators);

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

}  // namespace uqd
