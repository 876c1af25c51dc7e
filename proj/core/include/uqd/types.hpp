#pragma once

#include <cstddef>
#include <vector>

namespace uqd {

using Genotype = std::vector<double>;

struct EvaluationSample {
  double fitness = 0.0;
  std::vector<double> features;
};

// (delta_f, delta_r) trade-off preference: a gain of delta_r in
// reproducibility compensates a loss of delta_f in fitness. rho keeps the
// weighted-sum coefficient finite and breaks ties when delta_f = 0.
struct DeltaPreference {
  double delta_f = 0.0;
  double delta_r = 0.0;
  double rho = 1e-9;
};

enum class PerformanceEstimator { Mean, Median, ClosestToMedian, Mode };
enum class ReproducibilityEstimator { NegStd, NegMad, NegIqr };
enum class FeatureEstimator { Mean, Median };

struct EstimatorConfig {
  PerformanceEstimator performance = PerformanceEstimator::Mean;
  ReproducibilityEstimator reproducibility = ReproducibilityEstimator::NegStd;
  FeatureEstimator feature = FeatureEstimator::Mean;
};

struct SolutionRecord {
  Genotype genotype;
  std::vector<EvaluationSample> samples;
  std::size_t sample_count = 0;
  double est_fitness = 0.0;
  std::vector<double> est_features;
  double est_reproducibility = 0.0;
};

}  // namespace uqd
