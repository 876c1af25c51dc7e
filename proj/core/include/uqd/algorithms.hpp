#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uqd/pareto.hpp"
#include "uqd/rng.hpp"
#include "uqd/tasks.hpp"
#include "uqd/types.hpp"

namespace uqd {

enum class Algorithm {
  VanillaMe,
  MeSampling,
  MeSamplingReproducibility,
  MeLs,
  MeWeighted,
  MeDelta,
  VanillaAs,
  AsWeighted,
  AsDelta,
  MomeX,
};

bool is_archive_sampling(Algorithm algorithm);
bool requires_preference(Algorithm algorithm);
std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

struct MutationConfig {
  enum class Operator { IsoLine, Gaussian };
  Operator op = Operator::IsoLine;
  double sigma_iso = 0.01;
  double sigma_line = 0.1;
};

struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::MeSampling;
  std::size_t sampling_size = 4096;
  std::size_t fixed_samples = 32;
  std::size_t as_initial_samples = 2;
  int depth = 3;
  std::optional<DeltaPreference> preference;
  std::size_t generations = 250;
  MutationConfig mutation;
  EstimatorConfig estimators;
  std::size_t max_front_size = 6;
};

void validate(const AlgorithmConfig& cfg, const TaskSpec& task);

// vanilla_me runs the fixed-sampling loop with a single sample per offspring.
std::size_t effective_fixed_samples(const AlgorithmConfig& cfg);

// Explicit preference if set, else the task default.
DeltaPreference resolve_preference(const AlgorithmConfig& cfg, const TaskSpec& task);

// Addition rule for the non-Pareto algorithms.
AdditionRule addition_rule(const AlgorithmConfig& cfg, const TaskSpec& task);

struct LedgerRow {
  std::size_t generation = 0;
  std::size_t offspring_count = 0;
  std::size_t offspring_evals = 0;
  std::size_t reevaluation_evals = 0;

  std::size_t total() const { return offspring_evals + reevaluation_evals; }
};

struct BudgetLedger {
  std::vector<LedgerRow> rows;
  std::size_t cumulative_total = 0;
};

struct TraceRow {
  std::size_t generation = 0;
  std::size_t offspring_count = 0;
  std::size_t offspring_evals = 0;
  std::size_t reevaluation_evals = 0;
  std::size_t cumulative_evals = 0;
  std::size_t occupancy = 0;
  double coverage = 0.0;
  double sum_est_fitness = 0.0;
  double mean_est_fitness = 0.0;
  double max_est_fitness = 0.0;
  double mean_est_reproducibility = 0.0;
};

struct ExperimentState {
  ArchiveVariant archive;
  RngStream root;
  std::size_t generation = 0;
  BudgetLedger ledger;
  std::vector<TraceRow> trace;
};

ExperimentState make_initial_state(const TaskSpec& task, const AlgorithmConfig& cfg,
                                   std::uint64_t seed);

// One generation: fixed-sampling or archive-sampling depending on the
// algorithm. Evaluations may run on `workers` threads; archive additions are
// applied by a single writer in offspring-index order, so the outcome is
// independent of the parallel schedule.
void run_generation(ExperimentState& state, const TaskSpec& task, const AlgorithmConfig& cfg,
                    int workers = 1);

struct RunResult {
  ArchiveVariant archive;
  BudgetLedger ledger;
  std::vector<TraceRow> trace;
};

RunResult run_experiment(const TaskSpec& task, const AlgorithmConfig& cfg, std::uint64_t seed,
                         int workers = 1);

// Uniform over all occupants across cells (depth occupants included).
std::vector<Genotype> select_parents(const Archive& archive, std::size_t count,
                                     RngStream& stream);

// Crowding-biased: cell uniform over non-empty cells, member proportional to
// crowding distance with boundary members capped at twice the front's median
// finite distance.
std::vector<Genotype> select_parents(const ParetoArchive& archive, std::size_t count,
                                     RngStream& stream);

// iso_line: clamp(parent + sigma_iso * eps + sigma_line * u * (second_parent
// - parent)); gaussian: clamp(parent + sigma_iso * eps). Box is [0, 1]^G.
Genotype mutate(const Genotype& parent, const MutationConfig& cfg, const Genotype& second_parent,
                RngStream& stream);

}  // namespace uqd
