#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "uqd/types.hpp"

namespace uqd {

struct GridSpec {
  std::vector<double> feature_mins;
  std::vector<double> feature_maxs;
  std::vector<int> cells_per_dim;
  int depth = 1;

  std::size_t dims() const { return cells_per_dim.size(); }
  std::size_t total_cells() const;
};

void validate(const GridSpec& spec);

// Per-dimension index = floor((f - min) / (max - min) * n), clamped to
// [0, n - 1]; out-of-bounds features clamp to edge cells.
std::vector<int> cell_index(const std::vector<double>& features, const GridSpec& spec);

// Row-major flattening with dimension 0 fastest:
// flat = idx[0] + n0 * (idx[1] + n1 * (idx[2] + ...)).
std::size_t flat_cell_index(const std::vector<int>& index, const GridSpec& spec);
std::size_t cell_of(const std::vector<double>& features, const GridSpec& spec);
std::vector<int> unflatten_cell_index(std::size_t flat, const GridSpec& spec);

enum class RuleKind { FitnessOnly, ReproducibilityOnly, Ls, Weighted, Delta, Pareto };

struct AdditionRule {
  RuleKind kind = RuleKind::FitnessOnly;
  DeltaPreference preference;

  static AdditionRule fitness_only() { return {RuleKind::FitnessOnly, {}}; }
  static AdditionRule reproducibility_only() { return {RuleKind::ReproducibilityOnly, {}}; }
  static AdditionRule ls() { return {RuleKind::Ls, {}}; }
  static AdditionRule weighted(DeltaPreference pref) { return {RuleKind::Weighted, pref}; }
  static AdditionRule delta(DeltaPreference pref) { return {RuleKind::Delta, pref}; }
};

enum class AddStatus { Added, Replaced, Rejected };

struct AddOutcome {
  AddStatus status = AddStatus::Rejected;
  std::optional<SolutionRecord> evicted;
};

enum class CompareDecision { ReplaceElite, KeepElite };

// f + ((delta_f + rho) / (delta_r + rho)) * r
double weighted_fitness(double fitness, double reproducibility, const DeltaPreference& pref);

// ReplaceElite iff (f_i >= f_e + delta_f)
//             or  (f_i >= f_e and r_i >= r_e)
//             or  (f_i >= f_e - delta_f and r_i >= r_e + delta_r).
CompareDecision delta_compare(double f_i, double r_i, double f_e, double r_e,
                              const DeltaPreference& pref);

class Archive {
 public:
  Archive() = default;
  explicit Archive(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  std::size_t total_cells() const { return cells_.size(); }
  const std::vector<SolutionRecord>& cell(std::size_t flat) const { return cells_[flat]; }
  std::vector<SolutionRecord>& cell_mutable(std::size_t flat) { return cells_[flat]; }

  std::size_t occupancy() const;
  std::size_t filled_cells() const;
  void for_each_occupant(
      const std::function<void(std::size_t cell, std::size_t slot, const SolutionRecord&)>& fn)
      const;

 private:
  GridSpec spec_;
  std::vector<std::vector<SolutionRecord>> cells_;
};

// Single-elite addition (grid depth must be 1).
AddOutcome add_single(Archive& archive, SolutionRecord candidate, const AdditionRule& rule);

// Depth addition for scored rules (fitness_only, weighted): occupants kept in
// non-increasing score order, candidate placed after equal-scored occupants,
// overflow evicts the lowest-scored record.
AddOutcome add_scored_depth(Archive& archive, SolutionRecord candidate, const AdditionRule& rule);

// Depth addition for the delta rule: cascade walk from the most senior
// occupant; the first dominated occupant is displaced and continues the walk;
// the record left over at the end is appended if the cell has room, evicted
// otherwise.
AddOutcome add_delta_depth(Archive& archive, SolutionRecord candidate, const DeltaPreference& pref);

// Score used by fitness_only / reproducibility_only / weighted rules.
double rule_score(const SolutionRecord& record, const AdditionRule& rule);

}  // namespace uqd
