#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "uqd/archive.hpp"
#include "uqd/tasks.hpp"
#include "uqd/types.hpp"

namespace uqd {

// Post-hoc reevaluation of one archive occupant (the slot-0 elite of each
// filled cell). Corrected statistics are medians over the reevaluations;
// descriptor_variance is the mean per-coordinate population variance
// (sigma_rms squared).
struct ReevaluationRecord {
  std::size_t source_cell = 0;
  Genotype genotype;
  std::vector<EvaluationSample> samples;
  double corrected_fitness = 0.0;
  std::vector<double> corrected_features;
  double reproducibility = 0.0;
  double sigma_rms = 0.0;
  double descriptor_variance = 0.0;
  std::size_t corrected_cell = 0;
};

struct ReevaluationDataset {
  GridSpec grid;
  std::size_t reevals = 0;
  std::vector<ReevaluationRecord> records;

  void clear_samples();
};

// Reevaluation streams are role-separated from every training stream, so
// training results are unchanged by any choice of n.
ReevaluationDataset reevaluate_archive(const Archive& archive, const TaskSpec& task,
                                       std::size_t n, std::uint64_t seed, int workers = 1);

struct CorrectedSolution {
  std::size_t dataset_index = 0;
  double fitness = 0.0;
  std::vector<double> features;
  double reproducibility = 0.0;
  double sigma_rms = 0.0;
  double descriptor_variance = 0.0;
};

struct CorrectedArchive {
  GridSpec grid;
  std::vector<std::optional<CorrectedSolution>> cells;
  std::size_t filled = 0;
};

// Re-inserts every reevaluated solution at its corrected features' cell;
// collisions keep the higher corrected fitness (ties -> higher
// reproducibility).
CorrectedArchive corrected_archive(const ReevaluationDataset& dataset, const GridSpec& grid);

// Sum over filled cells of (corrected fitness - offset).
double corrected_qd_score(const CorrectedArchive& archive, double fitness_offset = 0.0);

// Two-pass score: pass 1 pools, per cell, the maximum descriptor variance
// over every solution of every run whose corrected cell is that cell; pass 2
// scores each run as the sum over its corrected archive of
// (1 - variance / cell max), with zero-max cells contributing 1.
std::vector<double> reproducibility_score(const std::vector<const ReevaluationDataset*>& runs);

// Mean over reevaluated solutions of clamp(1 - sigma_rms / sigma_max, 0, 1).
double average_reproducibility(const ReevaluationDataset& dataset, double sigma_max);

// Mean corrected fitness over filled cells.
double average_fitness(const CorrectedArchive& archive);

// Mean over filled cells of the gap to the optimum-band maximum of
// weighted_fitness, each cell's gap floored at 0.
double weighted_regret(const CorrectedArchive& archive, const TaskSpec& task,
                       const DeltaPreference& pref, const EstimatorConfig& estimators = {});

struct MetricReport {
  double coverage = 0.0;
  double corrected_qd_score = 0.0;
  std::optional<double> reproducibility_score;
  double average_reproducibility = 0.0;
  double average_fitness = 0.0;
  double weighted_regret = 0.0;
};

}  // namespace uqd
