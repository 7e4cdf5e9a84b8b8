#ifndef PARTEST_SIMULATE_H_
#define PARTEST_SIMULATE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "partest/nulltable.h"
#include "partest/priors.h"

namespace partest {

// A named data generator plus the study settings around it.
//
// Built-in two-sample scenarios (group 1 ~ N(0, 1), other groups
// ~ N(shift, scale^2)): gauss-shift (shift 0.5), gauss-scale (scale 0.6),
// gauss-shift-scale (0.36, 0.7), null-equal. Built-in independence
// scenarios: null-uniform and appendixD-mixture (two-component bivariate
// normal mixture; covariances multiplied by cov_scale, default 0.5).
//
// Parameter files add shapes with every parameter given explicitly:
//   two-sample: normal-pair (shift, scale)
//   independence: linear (slope, noise), parabola (curvature, noise),
//   sine (amplitude, frequency, noise), circle (radius, noise)
struct ScenarioSpec {
  std::string name;
  Problem problem = Problem::kKSample;
  int n = 100;
  std::vector<int> group_sizes;  // K-sample; defaults to two equal halves
  std::map<std::string, double> params;
  std::uint64_t seed = 1;
  int replicates = 1000;
  double alpha = 0.05;

  // Throws std::invalid_argument on bad settings or missing parameters.
  void validate() const;
};

// Names accepted by make_scenario.
std::vector<std::string> builtin_scenarios();

// Built-in scenario with its default parameters. Throws
// std::invalid_argument listing the built-ins for unknown names.
ScenarioSpec make_scenario(const std::string& name, int n);

// Reads `key=value` lines ('#' starts a comment). `shape` names the
// generator; every other key is a numeric parameter.
ScenarioSpec load_scenario_file(const std::filesystem::path& path, int n);

struct Dataset {
  Problem problem = Problem::kKSample;
  std::vector<int> labels;  // K-sample, 1-based
  std::vector<double> x;    // independence
  std::vector<double> y;    // response values in both problems
};

// Deterministic in (spec.seed, replicate).
Dataset generate_scenario(const ScenarioSpec& spec, long replicate);

// Ranked form of a dataset; tie-breaking seeds derive from the spec seed.
GroupedSample grouped_sample(const Dataset& data, std::uint64_t tie_seed);

struct PowerReport {
  int replicates = 0;
  double alpha = 0.05;
  double rejection_rate = 0.0;
  double standard_error = 0.0;
  std::vector<double> per_m_rates;  // index m - 2
  std::vector<double> per_m_standard_errors;
};

// Runs spec.replicates tests against the table and reports the fraction of
// final p-values <= alpha, plus the same per m. Throws TableIncompatible
// when the table does not fit the scenario.
PowerReport power_study(const ScenarioSpec& spec, const NullTable& table, CombineKind kind,
                        const PriorSpec& prior = {}, int threads = 1);

}  // namespace partest

#endif  // PARTEST_SIMULATE_H_
