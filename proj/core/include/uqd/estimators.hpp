#pragma once

#include <string>
#include <vector>

#include "uqd/types.hpp"

namespace uqd {

// Performance estimate of the fitness samples. Median uses the
// midpoint-of-two-middle convention for even counts; closest_to_median
// returns the sample value nearest the median (ties -> lowest sample index);
// mode returns the center of the most populated histogram bin with
// ceil(sqrt(n)) bins (ties -> lowest bin).
double estimate_performance(const std::vector<EvaluationSample>& samples,
                            const EstimatorConfig& cfg);

// Coordinate-wise mean or median of the feature vectors.
std::vector<double> estimate_features(const std::vector<EvaluationSample>& samples,
                                      const EstimatorConfig& cfg);

// Higher = more reproducible. neg_std is the negative root-mean-square of
// per-coordinate population standard deviations; neg_mad / neg_iqr aggregate
// MAD / IQR the same way. A single sample yields 0 (maximally reproducible
// by absence of evidence).
double estimate_reproducibility(const std::vector<EvaluationSample>& samples,
                                const EstimatorConfig& cfg);

// Refreshes sample_count and all cached estimates from record.samples.
void update_estimates(SolutionRecord& record, const EstimatorConfig& cfg);

std::string to_string(PerformanceEstimator v);
std::string to_string(ReproducibilityEstimator v);
std::string to_string(FeatureEstimator v);
PerformanceEstimator performance_estimator_from_string(const std::string& name);
ReproducibilityEstimator reproducibility_estimator_from_string(const std::string& name);
FeatureEstimator feature_estimator_from_string(const std::string& name);

}  // namespace uqd
