#include "uqd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace uqd {
namespace {

void require_non_empty(const std::vector<EvaluationSample>& samples) {
  if (samples.empty()) {
    throw std::invalid_argument("estimator requires at least one sample");
  }
}

double median_of_sorted(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return median_of_sorted(values);
}

// Linear-interpolation quantile (type 7) on a sorted vector, p in [0, 1].
double quantile_of_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double mode_of(const std::vector<double>& values) {
  const std::size_t n = values.size();
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it;
  const double hi = *max_it;
  if (lo == hi) return lo;
  const std::size_t bins =
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<std::size_t> counts(bins, 0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double v : values) {
    std::size_t b = static_cast<std::size_t>((v - lo) / width);
    if (b >= bins) b = bins - 1;
    ++counts[b];
  }
  std::size_t best = 0;
  for (std::size_t b = 1; b < bins; ++b) {
    if (counts[b] > counts[best]) best = b;
  }
  return lo + (static_cast<double>(best) + 0.5) * width;
}

std::vector<double> coordinate_values(const std::vector<EvaluationSample>& samples,
                                      std::size_t coord) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.features[coord]);
  return out;
}

double population_variance(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return var / n;
}

}  // namespace

double estimate_performance(const std::vector<EvaluationSample>& samples,
                            const EstimatorConfig& cfg) {
  require_non_empty(samples);
  std::vector<double> fitnesses;
  fitnesses.reserve(samples.size());
  for (const auto& s : samples) fitnesses.push_back(s.fitness);

  switch (cfg.performance) {
    case PerformanceEstimator::Mean: {
      double sum = 0.0;
      for (double f : fitnesses) sum += f;
      return sum / static_cast<double>(fitnesses.size());
    }
    case PerformanceEstimator::Median:
      return median_of(fitnesses);
    case PerformanceEstimator::ClosestToMedian: {
      const double med = median_of(fitnesses);
      std::size_t best = 0;
      double best_dist = std::abs(fitnesses[0] - med);
      for (std::size_t i = 1; i < fitnesses.size(); ++i) {
        const double dist = std::abs(fitnesses[i] - med);
        if (dist < best_dist) {
          best = i;
          best_dist = dist;
        }
      }
      return fitnesses[best];
    }
    case PerformanceEstimator::Mode:
      return mode_of(fitnesses);
  }
  throw std::invalid_argument("unknown performance estimator");
}

std::vector<double> estimate_features(const std::vector<EvaluationSample>& samples,
                                      const EstimatorConfig& cfg) {
  require_non_empty(samples);
  const std::size_t dims = samples.front().features.size();
  std::vector<double> out(dims, 0.0);
  for (std::size_t c = 0; c < dims; ++c) {
    auto values = coordinate_values(samples, c);
    if (cfg.feature == FeatureEstimator::Mean) {
      double sum = 0.0;
      for (double v : values) sum += v;
      out[c] = sum / static_cast<double>(values.size());
    } else {
      out[c] = median_of(std::move(values));
    }
  }
  return out;
}

double estimate_reproducibility(const std::vector<EvaluationSample>& samples,
                                const EstimatorConfig& cfg) {
  require_non_empty(samples);
  if (samples.size() == 1) return 0.0;
  const std::size_t dims = samples.front().features.size();
  double sum_sq = 0.0;
  for (std::size_t c = 0; c < dims; ++c) {
    auto values = coordinate_values(samples, c);
    // A constant coordinate has zero dispersion by definition; computing it
    // would leave rounding residue from the mean.
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) continue;
    double dispersion = 0.0;
    switch (cfg.reproducibility) {
      case ReproducibilityEstimator::NegStd:
        dispersion = std::sqrt(population_variance(values));
        break;
      case ReproducibilityEstimator::NegMad: {
        const double med = median_of(values);
        std::vector<double> deviations;
        deviations.reserve(values.size());
        for (double v : values) deviations.push_back(std::abs(v - med));
        dispersion = median_of(std::move(deviations));
        break;
      }
      case ReproducibilityEstimator::NegIqr: {
        std::sort(values.begin(), values.end());
        dispersion = quantile_of_sorted(values, 0.75) - quantile_of_sorted(values, 0.25);
        break;
      }
    }
    sum_sq += dispersion * dispersion;
  }
  return -std::sqrt(sum_sq / static_cast<double>(dims));
}

void update_estimates(SolutionRecord& record, const EstimatorConfig& cfg) {
  record.sample_count = record.samples.size();
  record.est_fitness = estimate_performance(record.samples, cfg);
  record.est_features = estimate_features(record.samples, cfg);
  record.est_reproducibility = estimate_reproducibility(record.samples, cfg);
}

std::string to_string(PerformanceEstimator v) {
  switch (v) {
    case PerformanceEstimator::Mean: return "mean";
    case PerformanceEstimator::Median: return "median";
    case PerformanceEstimator::ClosestToMedian: return "closest_to_median";
    case PerformanceEstimator::Mode: return "mode";
  }
  return "mean";
}

std::string to_string(ReproducibilityEstimator v) {
  switch (v) {
    case ReproducibilityEstimator::NegStd: return "neg_std";
    case ReproducibilityEstimator::NegMad: return "neg_mad";
    case ReproducibilityEstimator::NegIqr: return "neg_iqr";
  }
  return "neg_std";
}

std::string to_string(FeatureEstimator v) {
  switch (v) {
    case FeatureEstimator::Mean: return "mean";
    case FeatureEstimator::Median: return "median";
  }
  return "mean";
}

PerformanceEstimator performance_estimator_from_string(const std::string& name) {
  if (name == "mean") return PerformanceEstimator::Mean;
  if (name == "median") return PerformanceEstimator::Median;
  if (name == "closest_to_median") return PerformanceEstimator::ClosestToMedian;
  if (name == "mode") return PerformanceEstimator::Mode;
  throw std::invalid_argument("unknown performance estimator: " + name);
}

ReproducibilityEstimator reproducibility_estimator_from_string(const std::string& name) {
  if (name == "neg_std") return ReproducibilityEstimator::NegStd;
  if (name == "neg_mad") return ReproducibilityEstimator::NegMad;
  if (name == "neg_iqr") return ReproducibilityEstimator::NegIqr;
  throw std::invalid_argument("unknown reproducibility estimator: " + name);
}

FeatureEstimator feature_estimator_from_string(const std::string& name) {
  if (name == "mean") return FeatureEstimator::Mean;
  if (name == "median") return FeatureEstimator::Median;
  throw std::invalid_argument("unknown feature estimator: " + name);
}

}  // namespace uqd
