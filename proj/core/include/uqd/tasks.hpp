#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "uqd/archive.hpp"
#include "uqd/rng.hpp"
#include "uqd/types.hpp"

namespace uqd {

enum class ProfileKind {
  Linear,
  Deceptive,
  AvoidablePeak,
  UnavoidablePeak,
  ReprodGradient,
  ReprodRugged,
};

// Performance-reproducibility profile: feature-noise std as a function of
// the fitness coordinate.
struct ProfileSpec {
  ProfileKind kind = ProfileKind::Linear;
  std::map<std::string, double> parameters;

  double parameter(const std::string& name) const;
};

// Direct Mapping benchmark task: genotype (g_f, g_d1, ..., g_dD) encodes the
// fitness and expected features directly; Gaussian noise with fitness-
// dependent std perturbs the features. Reproducibility-maximisation profiles
// (reprod_gradient, reprod_rugged) force fitness to 0.
struct TaskSpec {
  std::string name;
  int genotype_dim = 3;
  int feature_dim = 2;
  GridSpec grid;
  ProfileSpec profile;
  DeltaPreference default_preference;
  std::pair<double, double> fitness_range{0.0, 1.0};
  std::pair<double, double> expected_optimum_fitness_band{0.0, 1.0};

  bool fitness_is_zero() const {
    return profile.kind == ProfileKind::ReprodGradient ||
           profile.kind == ProfileKind::ReprodRugged;
  }
  double sigma_max() const { return profile.parameter("sigma_max"); }
};

double profile_sigma(const ProfileSpec& profile, double f);

void validate(const TaskSpec& task);

EvaluationSample evaluate(const TaskSpec& task, const Genotype& genotype, RngStream stream);

Genotype sample_initial_genotype(const TaskSpec& task, RngStream& stream);

// Fitness interval whose weighted_fitness (using the closed-form
// reproducibility implied by the profile under the configured estimator)
// is within tau of the global maximum, located by a dense grid scan.
struct OptimumBand {
  double f_lo = 0.0;
  double f_hi = 0.0;
  double max_weighted = 0.0;
};

OptimumBand optimum_band(const TaskSpec& task, const DeltaPreference& pref,
                         const EstimatorConfig& estimators = {}, double tau = 0.02,
                         std::size_t scan_points = 10000);

// Closed-form reproducibility estimate implied by a noise std sigma under
// the configured dispersion estimator (population values, no sampling error).
double implied_reproducibility(double sigma, const EstimatorConfig& estimators);

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

const std::vector<std::string>& builtin_task_names();
TaskSpec builtin_task(const std::string& name);

TaskSpec load_task_file(const std::string& path);
void save_task_file(const TaskSpec& task, const std::string& path);

std::string task_to_json_string(const TaskSpec& task);
TaskSpec task_from_json_string(const std::string& text);

}  // namespace uqd
