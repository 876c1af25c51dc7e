#include "uqd/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace uqd {
namespace {

// Phi^-1(0.75): MAD of a centered Gaussian is this fraction of sigma.
constexpr double kGaussianMadScale = 0.67448975019608171;

GridSpec default_grid() {
  GridSpec grid;
  grid.feature_mins = {0.0, 0.0};
  grid.feature_maxs = {1.0, 1.0};
  grid.cells_per_dim = {32, 32};
  grid.depth = 1;
  return grid;
}

TaskSpec make_task(std::string name, ProfileKind kind, std::map<std::string, double> parameters,
                   DeltaPreference pref) {
  TaskSpec task;
  task.name = std::move(name);
  task.grid = default_grid();
  task.profile.kind = kind;
  task.profile.parameters = std::move(parameters);
  task.default_preference = pref;
  const OptimumBand band = optimum_band(task, task.default_preference);
  task.expected_optimum_fitness_band = {band.f_lo, band.f_hi};
  return task;
}

}  // namespace

double ProfileSpec::parameter(const std::string& name) const {
  const auto it = parameters.find(name);
  if (it == parameters.end()) {
    throw std::invalid_argument("profile parameter missing: " + name);
  }
  return it->second;
}

double profile_sigma(const ProfileSpec& profile, double f) {
  if (f < 0.0 || f > 1.0) {
    throw std::invalid_argument("profile_sigma requires f in [0, 1]");
  }
  const double sigma_max = profile.parameter("sigma_max");
  switch (profile.kind) {
    case ProfileKind::Linear:
      return sigma_max * f;
    case ProfileKind::Deceptive: {
      // Noise only partially recovers past the mid-fitness valley, so every
      // fitness gain from the quiet low-fitness region costs reproducibility;
      // a full recovery would let high-fitness candidates dominate outright.
      const double recovery = profile.parameter("valley_recovery");
      return f <= 0.5 ? sigma_max * 2.0 * f
                      : sigma_max * (1.0 - recovery * (2.0 * f - 1.0));
    }
    case ProfileKind::AvoidablePeak:
    case ProfileKind::UnavoidablePeak: {
      const double base = profile.parameter("base_scale") * sigma_max;
      const double step_at = 1.0 - profile.parameter("peak_gain");
      return f <= step_at ? base : base + profile.parameter("peak_drop");
    }
    case ProfileKind::ReprodGradient:
      return sigma_max * (1.0 - f);
    case ProfileKind::ReprodRugged:
      return sigma_max * 0.5 * (1.0 + std::sin(6.0 * std::numbers::pi * f));
  }
  throw std::invalid_argument("unknown profile kind");
}

void validate(const TaskSpec& task) {
  if (task.genotype_dim != task.feature_dim + 1) {
    throw std::invalid_argument("direct mapping requires genotype_dim = feature_dim + 1");
  }
  validate(task.grid);
  if (task.grid.dims() != static_cast<std::size_t>(task.feature_dim)) {
    throw std::invalid_argument("grid dimensionality must equal feature_dim");
  }
  if (!(task.fitness_range.first < task.fitness_range.second)) {
    throw std::invalid_argument("fitness_range must be a non-empty interval");
  }
  if (!(task.default_preference.delta_f >= 0.0) || !(task.default_preference.delta_r >= 0.0) ||
      !(task.default_preference.rho > 0.0)) {
    throw std::invalid_argument("default preference must satisfy delta_f,delta_r >= 0, rho > 0");
  }
  for (int k = 0; k <= 1000; ++k) {
    const double f = static_cast<double>(k) / 1000.0;
    const double sigma = profile_sigma(task.profile, f);
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("profile sigma must be finite and non-negative on [0, 1]");
    }
  }
}

EvaluationSample evaluate(const TaskSpec& task, const Genotype& genotype, RngStream stream) {
  const double g_f = genotype[0];
  const double sigma = profile_sigma(task.profile, g_f);
  EvaluationSample sample;
  sample.fitness = task.fitness_is_zero() ? 0.0 : g_f;
  sample.features.resize(static_cast<std::size_t>(task.feature_dim));
  for (int d = 0; d < task.feature_dim; ++d) {
    const double value = genotype[static_cast<std::size_t>(d) + 1] + sigma * stream.next_gaussian();
    sample.features[static_cast<std::size_t>(d)] =
        std::clamp(value, task.grid.feature_mins[static_cast<std::size_t>(d)],
                   task.grid.feature_maxs[static_cast<std::size_t>(d)]);
  }
  return sample;
}

Genotype sample_initial_genotype(const TaskSpec& task, RngStream& stream) {
  Genotype genotype(static_cast<std::size_t>(task.genotype_dim));
  for (auto& value : genotype) value = stream.next_double();
  return genotype;
}

double implied_reproducibility(double sigma, const EstimatorConfig& estimators) {
  switch (estimators.reproducibility) {
    case ReproducibilityEstimator::NegStd: return -sigma;
    case ReproducibilityEstimator::NegMad: return -kGaussianMadScale * sigma;
    case ReproducibilityEstimator::NegIqr: return -2.0 * kGaussianMadScale * sigma;
  }
  throw std::invalid_argument("unknown reproducibility estimator");
}

OptimumBand optimum_band(const TaskSpec& task, const DeltaPreference& pref,
                         const EstimatorConfig& estimators, double tau,
                         std::size_t scan_points) {
  if (scan_points < 2) throw std::invalid_argument("scan requires at least two points");
  std::vector<double> scores(scan_points, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < scan_points; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(scan_points - 1);
    const double fitness = task.fitness_is_zero() ? 0.0 : f;
    const double r = implied_reproducibility(profile_sigma(task.profile, f), estimators);
    scores[k] = weighted_fitness(fitness, r, pref);
    best = std::max(best, scores[k]);
  }
  OptimumBand band;
  band.max_weighted = best;
  band.f_lo = 1.0;
  band.f_hi = 0.0;
  for (std::size_t k = 0; k < scan_points; ++k) {
    if (best - scores[k] <= tau) {
      const double f = static_cast<double>(k) / static_cast<double>(scan_points - 1);
      band.f_lo = std::min(band.f_lo, f);
      band.f_hi = std::max(band.f_hi, f);
    }
  }
  return band;
}

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Linear: return "linear";
    case ProfileKind::Deceptive: return "deceptive";
    case ProfileKind::AvoidablePeak: return "avoidable_peak";
    case ProfileKind::UnavoidablePeak: return "unavoidable_peak";
    case ProfileKind::ReprodGradient: return "reprod_gradient";
    case ProfileKind::ReprodRugged: return "reprod_rugged";
  }
  return "linear";
}

ProfileKind profile_kind_from_string(const std::string& name) {
  if (name == "linear") return ProfileKind::Linear;
  if (name == "deceptive") return ProfileKind::Deceptive;
  if (name == "avoidable_peak") return ProfileKind::AvoidablePeak;
  if (name == "unavoidable_peak") return ProfileKind::UnavoidablePeak;
  if (name == "reprod_gradient") return ProfileKind::ReprodGradient;
  if (name == "reprod_rugged") return ProfileKind::ReprodRugged;
  throw std::invalid_argument("unknown profile kind: " + name);
}

const std::vector<std::string>& builtin_task_names() {
  static const std::vector<std::string> names = {
      "linear",          "deceptive",       "avoidable_peak",
      "unavoidable_peak", "reprod_gradient", "reprod_rugged",
  };
  return names;
}

TaskSpec builtin_task(const std::string& name) {
  if (name == "linear") {
    return make_task("linear", ProfileKind::Linear, {{"sigma_max", 0.2}}, {0.05, 0.05, 1e-9});
  }
  if (name == "deceptive") {
    return make_task("deceptive", ProfileKind::Deceptive,
                     {{"sigma_max", 0.2}, {"valley_recovery", 0.5}}, {0.0, 0.0, 1e-9});
  }
  if (name == "avoidable_peak") {
    return make_task(
        "avoidable_peak", ProfileKind::AvoidablePeak,
        {{"sigma_max", 0.2}, {"base_scale", 0.02}, {"peak_drop", 0.05}, {"peak_gain", 0.1}},
        {0.2, 0.02, 1e-9});
  }
  if (name == "unavoidable_peak") {
    return make_task(
        "unavoidable_peak", ProfileKind::UnavoidablePeak,
        {{"sigma_max", 0.2}, {"base_scale", 0.02}, {"peak_drop", 0.05}, {"peak_gain", 0.1}},
        {0.02, 0.02, 1e-9});
  }
  if (name == "reprod_gradient") {
    return make_task("reprod_gradient", ProfileKind::ReprodGradient, {{"sigma_max", 0.2}},
                     {0.05, 0.001, 1e-9});
  }
  if (name == "reprod_rugged") {
    return make_task("reprod_rugged", ProfileKind::ReprodRugged, {{"sigma_max", 0.2}},
                     {0.05, 0.001, 1e-9});
  }
  throw std::invalid_argument("unknown task: " + name);
}

namespace {

TaskSpec task_from_json(const nlohmann::json& doc) {
  TaskSpec task;
  task.name = doc.at("name").get<std::string>();
  task.genotype_dim = doc.at("genotype_dim").get<int>();
  task.feature_dim = doc.at("feature_dim").get<int>();
  const auto& grid = doc.at("grid");
  task.grid.feature_mins = grid.at("feature_mins").get<std::vector<double>>();
  task.grid.feature_maxs = grid.at("feature_maxs").get<std::vector<double>>();
  task.grid.cells_per_dim = grid.at("cells_per_dim").get<std::vector<int>>();
  task.grid.depth = grid.value("depth", 1);
  const auto& profile = doc.at("profile");
  task.profile.kind = profile_kind_from_string(profile.at("kind").get<std::string>());
  for (const auto& [key, value] : profile.at("parameters").items()) {
    task.profile.parameters[key] = value.get<double>();
  }
  const auto& pref = doc.at("default_preference");
  task.default_preference.delta_f = pref.at("delta_f").get<double>();
  task.default_preference.delta_r = pref.at("delta_r").get<double>();
  task.default_preference.rho = pref.value("rho", 1e-9);
  const auto range = doc.at("fitness_range").get<std::vector<double>>();
  task.fitness_range = {range.at(0), range.at(1)};
  if (doc.contains("expected_optimum_fitness_band")) {
    const auto band = doc.at("expected_optimum_fitness_band").get<std::vector<double>>();
    task.expected_optimum_fitness_band = {band.at(0), band.at(1)};
  }
  validate(task);
  return task;
}

nlohmann::json task_to_json(const TaskSpec& task) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["name"] = task.name;
  doc["genotype_dim"] = task.genotype_dim;
  doc["feature_dim"] = task.feature_dim;
  doc["grid"] = {
      {"feature_mins", task.grid.feature_mins},
      {"feature_maxs", task.grid.feature_maxs},
      {"cells_per_dim", task.grid.cells_per_dim},
      {"depth", task.grid.depth},
  };
  doc["profile"] = {
      {"kind", to_string(task.profile.kind)},
      {"parameters", task.profile.parameters},
  };
  doc["default_preference"] = {
      {"delta_f", task.default_preference.delta_f},
      {"delta_r", task.default_preference.delta_r},
      {"rho", task.default_preference.rho},
  };
  doc["fitness_range"] = {task.fitness_range.first, task.fitness_range.second};
  doc["expected_optimum_fitness_band"] = {task.expected_optimum_fitness_band.first,
                                          task.expected_optimum_fitness_band.second};
  return doc;
}

}  // namespace

TaskSpec load_task_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open task file: " + path);
  return task_from_json(nlohmann::json::parse(in));
}

void save_task_file(const TaskSpec& task, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write task file: " + path);
  out << task_to_json(task).dump(2) << "\n";
}

std::string task_to_json_string(const TaskSpec& task) { return task_to_json(task).dump(2); }

TaskSpec task_from_json_string(const std::string& text) {
  return task_from_json(nlohmann::json::parse(text));
}

}  // namespace uqd
