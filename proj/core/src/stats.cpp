#include "uqd/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>

namespace uqd {
namespace {

// Mid-ranks doubled so they stay integral under ties.
std::vector<long long> doubled_ranks(const std::vector<double>& magnitudes) {
  const std::size_t n = magnitudes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return magnitudes[a] < magnitudes[b]; });
  std::vector<long long> ranks(n, 0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
    // 1-based ranks i+1 .. j+1 share the mid-rank; doubled = (i+1) + (j+1)
    const long long doubled = static_cast<long long>(i + 1) + static_cast<long long>(j + 1);
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
    i = j + 1;
  }
  return ranks;
}

double exact_two_sided_p(const std::vector<long long>& doubled, double w_plus_doubled) {
  long long total = 0;
  for (long long r : doubled) total += r;
  std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
  ways[0] = 1.0;
  for (long long r : doubled) {
    for (long long s = total; s >= r; --s) {
      ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - r)];
    }
  }
  const double denom = std::ldexp(1.0, static_cast<int>(doubled.size()));
  const long long w = static_cast<long long>(std::llround(w_plus_doubled));
  double below = 0.0;
  double above = 0.0;
  for (long long s = 0; s <= total; ++s) {
    if (s <= w) below += ways[static_cast<std::size_t>(s)];
    if (s >= w) above += ways[static_cast<std::size_t>(s)];
  }
  return std::min(1.0, 2.0 * std::min(below, above) / denom);
}

double normal_two_sided_p(const std::vector<long long>& doubled, double w_plus) {
  const double m = static_cast<double>(doubled.size());
  const double mu = m * (m + 1.0) / 4.0;
  double tie_term = 0.0;
  std::vector<long long> sorted = doubled;
  std::sort(sorted.begin(), sorted.end());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double variance = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - tie_term / 48.0;
  const double z = (w_plus - mu) / std::sqrt(variance);
  return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
}

}  // namespace

double wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("paired test requires equal-length samples");
  }
  if (a.size() < 5) throw std::invalid_argument("paired test requires n >= 5");
  std::vector<double> magnitudes;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    magnitudes.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  if (magnitudes.empty()) return 1.0;

  const auto doubled = doubled_ranks(magnitudes);
  double w_plus_doubled = 0.0;
  for (std::size_t i = 0; i < doubled.size(); ++i) {
    if (positive[i]) w_plus_doubled += static_cast<double>(doubled[i]);
  }
  if (doubled.size() <= 20) return exact_two_sided_p(doubled, w_plus_doubled);
  return normal_two_sided_p(doubled, w_plus_doubled / 2.0);
}

std::vector<double> holm_bonferroni(const std::vector<double>& pvalues) {
  const std::size_t m = pvalues.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  std::vector<double> adjusted(m, 0.0);
  double running = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double scaled = std::min(1.0, static_cast<double>(m - j) * pvalues[order[j]]);
    running = std::max(running, scaled);
    adjusted[order[j]] = running;
  }
  return adjusted;
}

}  // namespace uqd
