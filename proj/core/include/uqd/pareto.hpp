#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "uqd/archive.hpp"
#include "uqd/types.hpp"

namespace uqd {

// One Pareto front per grid cell, objectives (est_fitness,
// est_reproducibility). Front order is insertion order (older first).
class ParetoArchive {
 public:
  ParetoArchive() = default;
  explicit ParetoArchive(GridSpec spec, std::size_t max_front_size = 6);

  const GridSpec& spec() const { return spec_; }
  std::size_t max_front_size() const { return max_front_size_; }
  std::size_t total_cells() const { return fronts_.size(); }
  const std::vector<SolutionRecord>& front(std::size_t flat) const { return fronts_[flat]; }
  std::vector<SolutionRecord>& front_mutable(std::size_t flat) { return fronts_[flat]; }

  std::size_t occupancy() const;
  std::size_t filled_cells() const;

 private:
  GridSpec spec_;
  std::size_t max_front_size_ = 6;
  std::vector<std::vector<SolutionRecord>> fronts_;
};

// Rejected iff some member weakly dominates the candidate (>= in both
// objectives; exact duplicates rejected). Otherwise the candidate is added,
// dominated members are removed, and capacity overflow evicts the member
// with the smallest crowding distance (ties -> most recently added).
AddOutcome add_pareto(ParetoArchive& archive, SolutionRecord candidate);

// NSGA-style crowding distances over (est_fitness, est_reproducibility);
// boundary members get +infinity, degenerate objective ranges contribute 0.
std::vector<double> crowding_distances(const std::vector<SolutionRecord>& front);

// Per non-empty cell, the front member with maximal weighted_fitness
// (ties -> higher est_reproducibility, then lower insertion order), emitted
// into a depth-1 archive at the same cell.
Archive project_pareto_archive(const ParetoArchive& archive, const DeltaPreference& pref);

using ArchiveVariant = std::variant<Archive, ParetoArchive>;

}  // namespace uqd
