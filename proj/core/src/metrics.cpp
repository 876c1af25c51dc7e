#include "uqd/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "uqd/estimators.hpp"
#include "uqd/rng.hpp"

namespace uqd {
namespace {

void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  const std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (std::size_t t = 0; t < thread_count; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& thread : pool) thread.join();
}

double mean_population_variance(const std::vector<EvaluationSample>& samples) {
  const std::size_t dims = samples.front().features.size();
  const double n = static_cast<double>(samples.size());
  double total = 0.0;
  for (std::size_t c = 0; c < dims; ++c) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.features[c];
    mean /= n;
    double var = 0.0;
    for (const auto& s : samples) {
      const double d = s.features[c] - mean;
      var += d * d;
    }
    total += var / n;
  }
  return total / static_cast<double>(dims);
}

}  // namespace

void ReevaluationDataset::clear_samples() {
  for (auto& record : records) {
    record.samples.clear();
    record.samples.shrink_to_fit();
  }
}

ReevaluationDataset reevaluate_archive(const Archive& archive, const TaskSpec& task,
                                       std::size_t n, std::uint64_t seed, int workers) {
  if (n < 2) throw std::invalid_argument("reevaluation requires n >= 2");
  if (archive.occupancy() == 0) {
    throw std::invalid_argument("cannot reevaluate an empty archive");
  }
  ReevaluationDataset dataset;
  dataset.grid = archive.spec();
  dataset.reevals = n;
  for (std::size_t c = 0; c < archive.total_cells(); ++c) {
    if (archive.cell(c).empty()) continue;
    ReevaluationRecord record;
    record.source_cell = c;
    record.genotype = archive.cell(c).front().genotype;
    dataset.records.push_back(std::move(record));
  }

  const EstimatorConfig median_cfg{PerformanceEstimator::Median, ReproducibilityEstimator::NegStd,
                                   FeatureEstimator::Median};
  const RngStream root = RngStream(seed).derive(StreamRole::PostHocReeval);
  parallel_for(dataset.records.size(), workers, [&](std::size_t i) {
    ReevaluationRecord& record = dataset.records[i];
    const RngStream cell_root = root.derive(record.source_cell);
    record.samples.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
      record.samples.push_back(evaluate(task, record.genotype, cell_root.derive(s)));
    }
    record.corrected_fitness = estimate_performance(record.samples, median_cfg);
    record.corrected_features = estimate_features(record.samples, median_cfg);
    record.reproducibility = estimate_reproducibility(record.samples, median_cfg);
    record.descriptor_variance = mean_population_variance(record.samples);
    record.sigma_rms = std::sqrt(record.descriptor_variance);
    GridSpec flat_grid = dataset.grid;
    flat_grid.depth = 1;
    record.corrected_cell = cell_of(record.corrected_features, flat_grid);
  });
  return dataset;
}

CorrectedArchive corrected_archive(const ReevaluationDataset& dataset, const GridSpec& grid) {
  CorrectedArchive archive;
  archive.grid = grid;
  archive.grid.depth = 1;
  archive.cells.assign(archive.grid.total_cells(), std::nullopt);
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& record = dataset.records[i];
    const std::size_t cell = cell_of(record.corrected_features, archive.grid);
    CorrectedSolution solution;
    solution.dataset_index = i;
    solution.fitness = record.corrected_fitness;
    solution.features = record.corrected_features;
    solution.reproducibility = record.reproducibility;
    solution.sigma_rms = record.sigma_rms;
    solution.descriptor_variance = record.descriptor_variance;
    auto& occupant = archive.cells[cell];
    if (!occupant.has_value()) {
      occupant = std::move(solution);
      ++archive.filled;
      continue;
    }
    const bool wins = solution.fitness > occupant->fitness ||
                      (solution.fitness == occupant->fitness &&
                       solution.reproducibility > occupant->reproducibility);
    if (wins) occupant = std::move(solution);
  }
  return archive;
}

double corrected_qd_score(const CorrectedArchive& archive, double fitness_offset) {
  double score = 0.0;
  for (const auto& cell : archive.cells) {
    if (cell.has_value()) score += cell->fitness - fitness_offset;
  }
  return score;
}

std::vector<double> reproducibility_score(const std::vector<const ReevaluationDataset*>& runs) {
  if (runs.empty()) return {};
  const GridSpec& grid = runs.front()->grid;
  for (const auto* run : runs) {
    if (run->grid.cells_per_dim != grid.cells_per_dim ||
        run->grid.feature_mins != grid.feature_mins ||
        run->grid.feature_maxs != grid.feature_maxs) {
      throw std::invalid_argument("reproducibility_score requires matching grids across runs");
    }
  }
  GridSpec flat_grid = grid;
  flat_grid.depth = 1;
  std::vector<double> max_variance(flat_grid.total_cells(), 0.0);
  for (const auto* run : runs) {
    for (const auto& record : run->records) {
      max_variance[record.corrected_cell] =
          std::max(max_variance[record.corrected_cell], record.descriptor_variance);
    }
  }
  std::vector<double> scores;
  scores.reserve(runs.size());
  for (const auto* run : runs) {
    const CorrectedArchive archive = corrected_archive(*run, flat_grid);
    double score = 0.0;
    for (std::size_t c = 0; c < archive.cells.size(); ++c) {
      if (!archive.cells[c].has_value()) continue;
      const double max_var = max_variance[c];
      score += max_var > 0.0 ? 1.0 - archive.cells[c]->descriptor_variance / max_var : 1.0;
    }
    scores.push_back(score);
  }
  return scores;
}

double average_reproducibility(const ReevaluationDataset& dataset, double sigma_max) {
  if (dataset.records.empty()) {
    throw std::invalid_argument("average_reproducibility requires a non-empty dataset");
  }
  double total = 0.0;
  for (const auto& record : dataset.records) {
    total += std::clamp(1.0 - record.sigma_rms / sigma_max, 0.0, 1.0);
  }
  return total / static_cast<double>(dataset.records.size());
}

double average_fitness(const CorrectedArchive& archive) {
  if (archive.filled == 0) {
    throw std::invalid_argument("average_fitness requires a non-empty archive");
  }
  double total = 0.0;
  for (const auto& cell : archive.cells) {
    if (cell.has_value()) total += cell->fitness;
  }
  return total / static_cast<double>(archive.filled);
}

double weighted_regret(const CorrectedArchive& archive, const TaskSpec& task,
                       const DeltaPreference& pref, const EstimatorConfig& estimators) {
  if (archive.filled == 0) {
    throw std::invalid_argument("weighted_regret requires a non-empty archive");
  }
  const OptimumBand band = optimum_band(task, pref, estimators);
  double total = 0.0;
  for (const auto& cell : archive.cells) {
    if (!cell.has_value()) continue;
    const double cell_score = weighted_fitness(cell->fitness, cell->reproducibility, pref);
    total += std::max(0.0, band.max_weighted - cell_score);
  }
  return total / static_cast<double>(archive.filled);
}

}  // namespace uqd
