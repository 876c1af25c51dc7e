#include "uqd/archive.hpp"

#include <cmath>
#include <stdexcept>

namespace uqd {

std::size_t GridSpec::total_cells() const {
  std::size_t total = 1;
  for (int n : cells_per_dim) total *= static_cast<std::size_t>(n);
  return total;
}

void validate(const GridSpec& spec) {
  const std::size_t d = spec.cells_per_dim.size();
  if (d == 0) throw std::invalid_argument("grid must have at least one dimension");
  if (spec.feature_mins.size() != d || spec.feature_maxs.size() != d) {
    throw std::invalid_argument("grid bounds must match cells_per_dim length");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!(spec.feature_mins[i] < spec.feature_maxs[i])) {
      throw std::invalid_argument("grid mins must be strictly below maxs");
    }
    if (spec.cells_per_dim[i] <= 0) {
      throw std::invalid_argument("cells_per_dim entries must be positive");
    }
  }
  if (spec.depth <= 0) throw std::invalid_argument("grid depth must be positive");
}

std::vector<int> cell_index(const std::vector<double>& features, const GridSpec& spec) {
  std::vector<int> idx(spec.dims(), 0);
  for (std::size_t d = 0; d < spec.dims(); ++d) {
    const double lo = spec.feature_mins[d];
    const double hi = spec.feature_maxs[d];
    const int n = spec.cells_per_dim[d];
    int i = static_cast<int>(std::floor((features[d] - lo) / (hi - lo) * n));
    if (i < 0) i = 0;
    if (i >= n) i = n - 1;
    idx[d] = i;
  }
  return idx;
}

std::size_t flat_cell_index(const std::vector<int>& index, const GridSpec& spec) {
  std::size_t flat = 0;
  for (std::size_t d = spec.dims(); d-- > 0;) {
    flat = flat * static_cast<std::size_t>(spec.cells_per_dim[d]) +
           static_cast<std::size_t>(index[d]);
  }
  return flat;
}

std::size_t cell_of(const std::vector<double>& features, const GridSpec& spec) {
  return flat_cell_index(cell_index(features, spec), spec);
}

std::vector<int> unflatten_cell_index(std::size_t flat, const GridSpec& spec) {
  std::vector<int> idx(spec.dims(), 0);
  for (std::size_t d = 0; d < spec.dims(); ++d) {
    const std::size_t n = static_cast<std::size_t>(spec.cells_per_dim[d]);
    idx[d] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

double weighted_fitness(double fitness, double reproducibility, const DeltaPreference& pref) {
  return fitness + ((pref.delta_f + pref.rho) / (pref.delta_r + pref.rho)) * reproducibility;
}

CompareDecision delta_compare(double f_i, double r_i, double f_e, double r_e,
                              const DeltaPreference& pref) {
  if (f_i >= f_e + pref.delta_f) return CompareDecision::ReplaceElite;
  if (f_i >= f_e && r_i >= r_e) return CompareDecision::ReplaceElite;
  if (f_i >= f_e - pref.delta_f && r_i >= r_e + pref.delta_r) return CompareDecision::ReplaceElite;
  return CompareDecision::KeepElite;
}

Archive::Archive(GridSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  cells_.resize(spec_.total_cells());
}

std::size_t Archive::occupancy() const {
  std::size_t count = 0;
  for (const auto& cell : cells_) count += cell.size();
  return count;
}

std::size_t Archive::filled_cells() const {
  std::size_t count = 0;
  for (const auto& cell : cells_) count += cell.empty() ? 0 : 1;
  return count;
}

void Archive::for_each_occupant(
    const std::function<void(std::size_t, std::size_t, const SolutionRecord&)>& fn) const {
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (std::size_t s = 0; s < cells_[c].size(); ++s) fn(c, s, cells_[c][s]);
  }
}

namespace {

void require_samples(const SolutionRecord& candidate) {
  if (candidate.sample_count == 0) {
    throw std::invalid_argument("candidate must carry at least one evaluation sample");
  }
}

}  // namespace

double rule_score(const SolutionRecord& record, const AdditionRule& rule) {
  switch (rule.kind) {
    case RuleKind::FitnessOnly: return record.est_fitness;
    case RuleKind::ReproducibilityOnly: return record.est_reproducibility;
    case RuleKind::Weighted:
      return weighted_fitness(record.est_fitness, record.est_reproducibility, rule.preference);
    default:
      throw std::invalid_argument("rule has no scalar score");
  }
}

AddOutcome add_single(Archive& archive, SolutionRecord candidate, const AdditionRule& rule) {
  require_samples(candidate);
  if (archive.spec().depth != 1) {
    throw std::invalid_argument("add_single requires a depth-1 archive");
  }
  if (rule.kind == RuleKind::Pareto) {
    throw std::invalid_argument("add_single does not support the pareto rule");
  }
  auto& cell = archive.cell_mutable(cell_of(candidate.est_features, archive.spec()));
  if (cell.empty()) {
    cell.push_back(std::move(candidate));
    return {AddStatus::Added, std::nullopt};
  }
  SolutionRecord& elite = cell.front();
  bool replace = false;
  switch (rule.kind) {
    case RuleKind::FitnessOnly:
    case RuleKind::ReproducibilityOnly:
    case RuleKind::Weighted:
      replace = rule_score(candidate, rule) > rule_score(elite, rule);
      break;
    case RuleKind::Ls:
      replace = candidate.est_fitness >= elite.est_fitness &&
                candidate.est_reproducibility >= elite.est_reproducibility;
      break;
    case RuleKind::Delta:
      replace = delta_compare(candidate.est_fitness, candidate.est_reproducibility,
                              elite.est_fitness, elite.est_reproducibility,
                              rule.preference) == CompareDecision::ReplaceElite;
      break;
    case RuleKind::Pareto:
      break;
  }
  if (!replace) return {AddStatus::Rejected, std::nullopt};
  AddOutcome outcome{AddStatus::Replaced, std::move(elite)};
  elite = std::move(candidate);
  return outcome;
}

AddOutcome add_scored_depth(Archive& archive, SolutionRecord candidate, const AdditionRule& rule) {
  require_samples(candidate);
  if (rule.kind != RuleKind::FitnessOnly && rule.kind != RuleKind::Weighted) {
    throw std::invalid_argument("add_scored_depth supports fitness_only and weighted rules");
  }
  const std::size_t depth = static_cast<std::size_t>(archive.spec().depth);
  auto& cell = archive.cell_mutable(cell_of(candidate.est_features, archive.spec()));
  const double score = rule_score(candidate, rule);
  std::size_t pos = 0;
  while (pos < cell.size() && rule_score(cell[pos], rule) >= score) ++pos;
  if (pos >= depth) return {AddStatus::Rejected, std::nullopt};
  cell.insert(cell.begin() + static_cast<std::ptrdiff_t>(pos), std::move(candidate));
  if (cell.size() <= depth) return {AddStatus::Added, std::nullopt};
  AddOutcome outcome{AddStatus::Replaced, std::move(cell.back())};
  cell.pop_back();
  return outcome;
}

AddOutcome add_delta_depth(Archive& archive, SolutionRecord candidate, const DeltaPreference& pref) {
  require_samples(candidate);
  const std::size_t depth = static_cast<std::size_t>(archive.spec().depth);
  auto& cell = archive.cell_mutable(cell_of(candidate.est_features, archive.spec()));
  SolutionRecord carried = std::move(candidate);
  bool displaced_any = false;
  for (auto& occupant : cell) {
    if (delta_compare(carried.est_fitness, carried.est_reproducibility, occupant.est_fitness,
                      occupant.est_reproducibility, pref) == CompareDecision::ReplaceElite) {
      std::swap(carried, occupant);
      displaced_any = true;
    }
  }
  if (cell.size() < depth) {
    cell.push_back(std::move(carried));
    return {AddStatus::Added, std::nullopt};
  }
  if (!displaced_any) return {AddStatus::Rejected, std::nullopt};
  return {AddStatus::Replaced, std::move(carried)};
}

}  // namespace uqd
