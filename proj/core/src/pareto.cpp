#include "uqd/pareto.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace uqd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool weakly_dominates(const SolutionRecord& a, const SolutionRecord& b) {
  return a.est_fitness >= b.est_fitness && a.est_reproducibility >= b.est_reproducibility;
}

}  // namespace

ParetoArchive::ParetoArchive(GridSpec spec, std::size_t max_front_size)
    : spec_(std::move(spec)), max_front_size_(max_front_size) {
  validate(spec_);
  if (max_front_size_ == 0) throw std::invalid_argument("max_front_size must be positive");
  fronts_.resize(spec_.total_cells());
}

std::size_t ParetoArchive::occupancy() const {
  std::size_t count = 0;
  for (const auto& front : fronts_) count += front.size();
  return count;
}

std::size_t ParetoArchive::filled_cells() const {
  std::size_t count = 0;
  for (const auto& front : fronts_) count += front.empty() ? 0 : 1;
  return count;
}

std::vector<double> crowding_distances(const std::vector<SolutionRecord>& front) {
  const std::size_t n = front.size();
  std::vector<double> distance(n, 0.0);
  if (n <= 2) {
    std::fill(distance.begin(), distance.end(), kInf);
    return distance;
  }
  for (int objective = 0; objective < 2; ++objective) {
    auto value = [&](std::size_t i) {
      return objective == 0 ? front[i].est_fitness : front[i].est_reproducibility;
    };
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
    distance[order.front()] = kInf;
    distance[order.back()] = kInf;
    const double range = value(order.back()) - value(order.front());
    if (range <= 0.0) continue;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const std::size_t i = order[k];
      if (distance[i] == kInf) continue;
      distance[i] += (value(order[k + 1]) - value(order[k - 1])) / range;
    }
  }
  return distance;
}

AddOutcome add_pareto(ParetoArchive& archive, SolutionRecord candidate) {
  if (candidate.sample_count == 0) {
    throw std::invalid_argument("candidate must carry at least one evaluation sample");
  }
  auto& front = archive.front_mutable(cell_of(candidate.est_features, archive.spec()));
  for (const auto& member : front) {
    if (weakly_dominates(member, candidate)) return {AddStatus::Rejected, std::nullopt};
  }
  std::erase_if(front, [&](const SolutionRecord& member) {
    return weakly_dominates(candidate, member);
  });
  front.push_back(std::move(candidate));
  if (front.size() <= archive.max_front_size()) return {AddStatus::Added, std::nullopt};

  const auto distance = crowding_distances(front);
  std::size_t evict = 0;
  for (std::size_t i = 1; i < front.size(); ++i) {
    if (distance[i] <= distance[evict]) evict = i;  // ties -> most recently added
  }
  AddOutcome outcome{AddStatus::Replaced, std::move(front[evict])};
  front.erase(front.begin() + static_cast<std::ptrdiff_t>(evict));
  return outcome;
}

Archive project_pareto_archive(const ParetoArchive& archive, const DeltaPreference& pref) {
  GridSpec spec = archive.spec();
  spec.depth = 1;
  Archive projected(spec);
  for (std::size_t c = 0; c < archive.total_cells(); ++c) {
    const auto& front = archive.front(c);
    if (front.empty()) continue;
    std::size_t best = 0;
    double best_score = weighted_fitness(front[0].est_fitness, front[0].est_reproducibility, pref);
    for (std::size_t i = 1; i < front.size(); ++i) {
      const double score =
          weighted_fitness(front[i].est_fitness, front[i].est_reproducibility, pref);
      if (score > best_score ||
          (score == best_score &&
           front[i].est_reproducibility > front[best].est_reproducibility)) {
        best = i;
        best_score = score;
      }
    }
    projected.cell_mutable(c).push_back(front[best]);
  }
  return projected;
}

}  // namespace uqd
