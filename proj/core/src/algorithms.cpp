#include "uqd/algorithms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "uqd/estimators.hpp"

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

struct OccupantRef {
  std::size_t cell = 0;
  std::size_t slot = 0;
};

std::vector<OccupantRef> list_occupants(const Archive& archive) {
  std::vector<OccupantRef> refs;
  archive.for_each_occupant(
      [&](std::size_t cell, std::size_t slot, const SolutionRecord&) {
        refs.push_back({cell, slot});
      });
  return refs;
}

// Offspring genotypes for one generation: initial sampler when the archive
// is empty, otherwise two-parent variation.
std::vector<Genotype> make_offspring(const ExperimentState& state, const TaskSpec& task,
                                     const AlgorithmConfig& cfg, std::size_t count) {
  std::vector<Genotype> offspring(count);
  const std::size_t gen = state.generation;
  const bool empty = std::visit([](const auto& a) { return a.occupancy() == 0; }, state.archive);
  for (std::size_t o = 0; o < count; ++o) {
    if (empty) {
      RngStream init = state.root.derive(StreamRole::Init).derive(gen).derive(o);
      offspring[o] = sample_initial_genotype(task, init);
      continue;
    }
    RngStream sel = state.root.derive(StreamRole::Selection).derive(gen).derive(o);
    const auto parents = std::visit(
        [&](const auto& archive) { return select_parents(archive, 2, sel); }, state.archive);
    RngStream mut = state.root.derive(StreamRole::Mutation).derive(gen).derive(o);
    offspring[o] = mutate(parents[0], cfg.mutation, parents[1], mut);
  }
  return offspring;
}

std::vector<SolutionRecord> evaluate_offspring(const ExperimentState& state, const TaskSpec& task,
                                               const AlgorithmConfig& cfg,
                                               std::vector<Genotype> genotypes,
                                               std::size_t samples_each, int workers) {
  const std::size_t gen = state.generation;
  std::vector<SolutionRecord> records(genotypes.size());
  const RngStream eval_root = state.root.derive(StreamRole::OffspringEval).derive(gen);
  parallel_for(genotypes.size(), workers, [&](std::size_t o) {
    SolutionRecord& record = records[o];
    record.genotype = std::move(genotypes[o]);
    record.samples.reserve(samples_each);
    const RngStream offspring_root = eval_root.derive(o);
    for (std::size_t s = 0; s < samples_each; ++s) {
      record.samples.push_back(evaluate(task, record.genotype, offspring_root.derive(s)));
    }
    update_estimates(record, cfg.estimators);
  });
  return records;
}

void add_offspring(ExperimentState& state, const TaskSpec& task, const AlgorithmConfig& cfg,
                   std::vector<SolutionRecord> records) {
  if (cfg.algorithm == Algorithm::MomeX) {
    auto& archive = std::get<ParetoArchive>(state.archive);
    for (auto& record : records) add_pareto(archive, std::move(record));
    return;
  }
  auto& archive = std::get<Archive>(state.archive);
  const AdditionRule rule = addition_rule(cfg, task);
  if (!is_archive_sampling(cfg.algorithm)) {
    for (auto& record : records) add_single(archive, std::move(record), rule);
    return;
  }
  if (rule.kind == RuleKind::Delta) {
    for (auto& record : records) add_delta_depth(archive, std::move(record), rule.preference);
  } else {
    for (auto& record : records) add_scored_depth(archive, std::move(record), rule);
  }
}

void append_trace(ExperimentState& state) {
  const LedgerRow& row = state.ledger.rows.back();
  TraceRow trace;
  trace.generation = row.generation;
  trace.offspring_count = row.offspring_count;
  trace.offspring_evals = row.offspring_evals;
  trace.reevaluation_evals = row.reevaluation_evals;
  trace.cumulative_evals = state.ledger.cumulative_total;

  double sum_f = 0.0;
  double max_f = -std::numeric_limits<double>::infinity();
  double sum_r = 0.0;
  std::size_t occupants = 0;
  std::size_t filled = 0;
  std::size_t total_cells = 0;
  auto accumulate = [&](const SolutionRecord& record) {
    sum_f += record.est_fitness;
    max_f = std::max(max_f, record.est_fitness);
    sum_r += record.est_reproducibility;
    ++occupants;
  };
  if (const auto* grid = std::get_if<Archive>(&state.archive)) {
    grid->for_each_occupant(
        [&](std::size_t, std::size_t, const SolutionRecord& record) { accumulate(record); });
    filled = grid->filled_cells();
    total_cells = grid->total_cells();
  } else {
    const auto& pareto = std::get<ParetoArchive>(state.archive);
    for (std::size_t c = 0; c < pareto.total_cells(); ++c) {
      for (const auto& record : pareto.front(c)) accumulate(record);
    }
    filled = pareto.filled_cells();
    total_cells = pareto.total_cells();
  }
  trace.occupancy = occupants;
  trace.coverage = static_cast<double>(filled) / static_cast<double>(total_cells);
  trace.sum_est_fitness = sum_f;
  if (occupants > 0) {
    trace.mean_est_fitness = sum_f / static_cast<double>(occupants);
    trace.max_est_fitness = max_f;
    trace.mean_est_reproducibility = sum_r / static_cast<double>(occupants);
  }
  state.trace.push_back(trace);
}

void run_generation_fixed(ExperimentState& state, const TaskSpec& task, const AlgorithmConfig& cfg,
                          int workers) {
  const std::size_t samples_each = effective_fixed_samples(cfg);
  const std::size_t count = cfg.sampling_size / samples_each;
  auto genotypes = make_offspring(state, task, cfg, count);
  auto records = evaluate_offspring(state, task, cfg, std::move(genotypes), samples_each, workers);
  add_offspring(state, task, cfg, std::move(records));

  LedgerRow row;
  row.generation = state.generation;
  row.offspring_count = count;
  row.offspring_evals = count * samples_each;
  row.reevaluation_evals = 0;
  state.ledger.rows.push_back(row);
  state.ledger.cumulative_total += row.total();
}

// Extraction order for re-settling: scored rules re-add in descending
// refreshed-score order; the delta rule re-adds slot-major (all cascade
// heads first), preserving seniority.
std::vector<SolutionRecord> extract_for_resettle(Archive& archive, const AdditionRule& rule) {
  std::vector<SolutionRecord> extracted;
  if (rule.kind == RuleKind::Delta) {
    const std::size_t depth = static_cast<std::size_t>(archive.spec().depth);
    for (std::size_t slot = 0; slot < depth; ++slot) {
      for (std::size_t c = 0; c < archive.total_cells(); ++c) {
        auto& cell = archive.cell_mutable(c);
        if (slot < cell.size()) extracted.push_back(std::move(cell[slot]));
      }
    }
  } else {
    struct Entry {
      double score;
      std::size_t cell;
      std::size_t slot;
    };
    std::vector<Entry> entries;
    archive.for_each_occupant([&](std::size_t cell, std::size_t slot, const SolutionRecord& rec) {
      entries.push_back({rule_score(rec, rule), cell, slot});
    });
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.cell != b.cell) return a.cell < b.cell;
      return a.slot < b.slot;
    });
    extracted.reserve(entries.size());
    for (const auto& entry : entries) {
      extracted.push_back(std::move(archive.cell_mutable(entry.cell)[entry.slot]));
    }
  }
  for (std::size_t c = 0; c < archive.total_cells(); ++c) archive.cell_mutable(c).clear();
  return extracted;
}

void resettle(Archive& archive, std::vector<SolutionRecord> occupants, const AdditionRule& rule) {
  for (auto& record : occupants) {
    if (rule.kind == RuleKind::Delta) {
      add_delta_depth(archive, std::move(record), rule.preference);
    } else {
      add_scored_depth(archive, std::move(record), rule);
    }
  }
}

void run_generation_as(ExperimentState& state, const TaskSpec& task, const AlgorithmConfig& cfg,
                       int workers) {
  auto& archive = std::get<Archive>(state.archive);
  const std::size_t gen = state.generation;
  const AdditionRule rule = addition_rule(cfg, task);

  const auto refs = list_occupants(archive);
  std::vector<EvaluationSample> fresh(refs.size());
  const RngStream reeval_root = state.root.derive(StreamRole::ArchiveReeval).derive(gen);
  parallel_for(refs.size(), workers, [&](std::size_t i) {
    const auto& record = archive.cell(refs[i].cell)[refs[i].slot];
    fresh[i] = evaluate(task, record.genotype,
                        reeval_root.derive(refs[i].cell).derive(refs[i].slot));
  });
  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto& record = archive.cell_mutable(refs[i].cell)[refs[i].slot];
    record.samples.push_back(std::move(fresh[i]));
    update_estimates(record, cfg.estimators);
  }
  resettle(archive, extract_for_resettle(archive, rule), rule);

  const std::size_t reeval_count = refs.size();
  const std::size_t budget =
      cfg.sampling_size > reeval_count ? cfg.sampling_size - reeval_count : 0;
  const std::size_t count = budget / cfg.as_initial_samples;
  auto genotypes = make_offspring(state, task, cfg, count);
  auto records =
      evaluate_offspring(state, task, cfg, std::move(genotypes), cfg.as_initial_samples, workers);
  add_offspring(state, task, cfg, std::move(records));

  LedgerRow row;
  row.generation = gen;
  row.offspring_count = count;
  row.offspring_evals = count * cfg.as_initial_samples;
  row.reevaluation_evals = reeval_count;
  state.ledger.rows.push_back(row);
  state.ledger.cumulative_total += row.total();
}

}  // namespace

bool is_archive_sampling(Algorithm algorithm) {
  return algorithm == Algorithm::VanillaAs || algorithm == Algorithm::AsWeighted ||
         algorithm == Algorithm::AsDelta;
}

bool requires_preference(Algorithm algorithm) {
  return algorithm == Algorithm::MeWeighted || algorithm == Algorithm::MeDelta ||
         algorithm == Algorithm::AsWeighted || algorithm == Algorithm::AsDelta;
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::VanillaMe: return "vanilla_me";
    case Algorithm::MeSampling: return "me_sampling";
    case Algorithm::MeSamplingReproducibility: return "me_sampling_reproducibility";
    case Algorithm::MeLs: return "me_ls";
    case Algorithm::MeWeighted: return "me_weighted";
    case Algorithm::MeDelta: return "me_delta";
    case Algorithm::VanillaAs: return "vanilla_as";
    case Algorithm::AsWeighted: return "as_weighted";
    case Algorithm::AsDelta: return "as_delta";
    case Algorithm::MomeX: return "mome_x";
  }
  return "me_sampling";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "vanilla_me") return Algorithm::VanillaMe;
  if (name == "me_sampling") return Algorithm::MeSampling;
  if (name == "me_sampling_reproducibility") return Algorithm::MeSamplingReproducibility;
  if (name == "me_ls") return Algorithm::MeLs;
  if (name == "me_weighted") return Algorithm::MeWeighted;
  if (name == "me_delta") return Algorithm::MeDelta;
  if (name == "vanilla_as") return Algorithm::VanillaAs;
  if (name == "as_weighted") return Algorithm::AsWeighted;
  if (name == "as_delta") return Algorithm::AsDelta;
  if (name == "mome_x") return Algorithm::MomeX;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::size_t effective_fixed_samples(const AlgorithmConfig& cfg) {
  return cfg.algorithm == Algorithm::VanillaMe ? 1 : cfg.fixed_samples;
}

DeltaPreference resolve_preference(const AlgorithmConfig& cfg, const TaskSpec& task) {
  return cfg.preference.value_or(task.default_preference);
}

AdditionRule addition_rule(const AlgorithmConfig& cfg, const TaskSpec& task) {
  switch (cfg.algorithm) {
    case Algorithm::VanillaMe:
    case Algorithm::MeSampling:
    case Algorithm::VanillaAs:
      return AdditionRule::fitness_only();
    case Algorithm::MeSamplingReproducibility:
      return AdditionRule::reproducibility_only();
    case Algorithm::MeLs:
      return AdditionRule::ls();
    case Algorithm::MeWeighted:
    case Algorithm::AsWeighted:
      return AdditionRule::weighted(resolve_preference(cfg, task));
    case Algorithm::MeDelta:
    case Algorithm::AsDelta:
      return AdditionRule::delta(resolve_preference(cfg, task));
    case Algorithm::MomeX:
      break;
  }
  throw std::invalid_argument("mome_x uses pareto addition, not a scored rule");
}

void validate(const AlgorithmConfig& cfg, const TaskSpec& task) {
  validate(task);
  if (cfg.sampling_size == 0) throw std::invalid_argument("sampling_size must be positive");
  if (cfg.fixed_samples == 0) throw std::invalid_argument("fixed_samples must be positive");
  if (cfg.as_initial_samples == 0) {
    throw std::invalid_argument("as_initial_samples must be positive");
  }
  if (cfg.depth <= 0) throw std::invalid_argument("depth must be positive");
  if (cfg.max_front_size == 0) throw std::invalid_argument("max_front_size must be positive");
  if (cfg.mutation.sigma_iso < 0.0 || cfg.mutation.sigma_line < 0.0) {
    throw std::invalid_argument("mutation sigmas must be non-negative");
  }
  if (is_archive_sampling(cfg.algorithm)) {
    const std::size_t capacity =
        task.grid.total_cells() * static_cast<std::size_t>(cfg.depth);
    if (cfg.sampling_size <= capacity) {
      throw std::invalid_argument(
          "archive-sampling requires sampling_size above archive capacity");
    }
  } else if (cfg.sampling_size < effective_fixed_samples(cfg)) {
    throw std::invalid_argument("sampling_size must cover at least one offspring");
  }
}

ExperimentState make_initial_state(const TaskSpec& task, const AlgorithmConfig& cfg,
                                   std::uint64_t seed) {
  validate(cfg, task);
  GridSpec grid = task.grid;
  grid.depth = is_archive_sampling(cfg.algorithm) ? cfg.depth : 1;
  ExperimentState state;
  if (cfg.algorithm == Algorithm::MomeX) {
    grid.depth = 1;
    state.archive = ParetoArchive(grid, cfg.max_front_size);
  } else {
    state.archive = Archive(grid);
  }
  state.root = RngStream(seed);
  return state;
}

void run_generation(ExperimentState& state, const TaskSpec& task, const AlgorithmConfig& cfg,
                    int workers) {
  if (is_archive_sampling(cfg.algorithm)) {
    run_generation_as(state, task, cfg, workers);
  } else {
    run_generation_fixed(state, task, cfg, workers);
  }
  append_trace(state);
  ++state.generation;
}

RunResult run_experiment(const TaskSpec& task, const AlgorithmConfig& cfg, std::uint64_t seed,
                         int workers) {
  ExperimentState state = make_initial_state(task, cfg, seed);
  for (std::size_t g = 0; g < cfg.generations; ++g) {
    run_generation(state, task, cfg, workers);
  }
  return {std::move(state.archive), std::move(state.ledger), std::move(state.trace)};
}

std::vector<Genotype> select_parents(const Archive& archive, std::size_t count,
                                     RngStream& stream) {
  std::vector<OccupantRef> refs = list_occupants(archive);
  if (refs.empty()) throw std::invalid_argument("cannot select parents from an empty archive");
  std::vector<Genotype> parents;
  parents.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& ref = refs[stream.next_below(refs.size())];
    parents.push_back(archive.cell(ref.cell)[ref.slot].genotype);
  }
  return parents;
}

std::vector<Genotype> select_parents(const ParetoArchive& archive, std::size_t count,
                                     RngStream& stream) {
  std::vector<std::size_t> non_empty;
  for (std::size_t c = 0; c < archive.total_cells(); ++c) {
    if (!archive.front(c).empty()) non_empty.push_back(c);
  }
  if (non_empty.empty()) {
    throw std::invalid_argument("cannot select parents from an empty archive");
  }
  std::vector<Genotype> parents;
  parents.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& front = archive.front(non_empty[stream.next_below(non_empty.size())]);
    if (front.size() == 1) {
      parents.push_back(front.front().genotype);
      continue;
    }
    auto weights = crowding_distances(front);
    std::vector<double> finite;
    for (double w : weights) {
      if (std::isfinite(w)) finite.push_back(w);
    }
    double cap = 1.0;
    if (!finite.empty()) {
      std::sort(finite.begin(), finite.end());
      const std::size_t n = finite.size();
      const double median =
          n % 2 == 1 ? finite[n / 2] : 0.5 * (finite[n / 2 - 1] + finite[n / 2]);
      cap = 2.0 * median;
    }
    double total = 0.0;
    for (double& w : weights) {
      w = std::isfinite(w) ? std::min(w, cap) : cap;
      total += w;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = stream.next_double() * total;
      double running = 0.0;
      for (std::size_t m = 0; m < weights.size(); ++m) {
        running += weights[m];
        pick = m;
        if (target < running) break;
      }
    } else {
      pick = stream.next_below(front.size());
    }
    parents.push_back(front[pick].genotype);
  }
  return parents;
}

Genotype mutate(const Genotype& parent, const MutationConfig& cfg, const Genotype& second_parent,
                RngStream& stream) {
  Genotype child(parent.size());
  if (cfg.op == MutationConfig::Operator::IsoLine) {
    std::vector<double> eps(parent.size());
    for (auto& e : eps) e = stream.next_gaussian();
    const double u = stream.next_gaussian();
    for (std::size_t i = 0; i < parent.size(); ++i) {
      child[i] = parent[i] + cfg.sigma_iso * eps[i] +
                 cfg.sigma_line * u * (second_parent[i] - parent[i]);
    }
  } else {
    for (std::size_t i = 0; i < parent.size(); ++i) {
      child[i] = parent[i] + cfg.sigma_iso * stream.next_gaussian();
    }
  }
  for (auto& value : child) value = std::clamp(value, 0.0, 1.0);
  return child;
}

}  // namespace uqd
