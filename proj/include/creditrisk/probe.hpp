#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "creditrisk/gbm.hpp"
#include "creditrisk/lime.hpp"

namespace creditrisk {

// Failure-mode experiments for local surrogate explanations.
enum class ProbeScenario {
  kHighDim,      // stability as the number of features grows
  kCorrelated,   // stability as the pairwise feature correlation grows
  kKernelSweep,  // local slope of a kinked 1-feature function vs. kernel width
};

const char* ProbeScenarioName(ProbeScenario scenario);
ProbeScenario ParseProbeScenario(const std::string& name);

struct ProbeSpec {
  // Synthetic portfolio behind the high_dim / correlated black boxes.
  std::size_t n_rows = 20000;
  double bad_rate = 0.03;
  std::uint64_t seed = 0;
  // Shallow, large-leaf trees: a deeper model overfits the noise features at
  // p=100 and its PD surface swamps the dimensionality effect.
  GbmConfig gbm{.n_trees = 100, .max_depth = 2, .min_samples_leaf = 100};
  LimeConfig lime;
  int runs = 3;
  // Units explained per setting: the first n_units rows of the data.
  int n_units = 150;

  std::vector<std::size_t> dimensions = {10, 20, 50, 100};
  double high_dim_correlation = 0.0;

  std::vector<double> correlations = {0.0, 0.5, 0.9};
  std::size_t correlated_features = 20;

  // Multiples of the default kernel width 0.75 * sqrt(1).
  std::vector<double> width_multipliers = {0.1, 0.5, 1.0, 2.0, 5.0};
  double sweep_unit = 0.01;
};

struct ProbeRow {
  double parameter = 0.0;  // p for high_dim, correlation for correlated
  double topk_overlap = 0.0;
  double mean_abs_top_contribution = 0.0;
  double mean_dispersion = 0.0;
  double mean_r_squared = 0.0;
};

struct KernelSweepRow {
  double width_multiplier = 0.0;
  double kernel_width = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

struct ProbeReport {
  ProbeScenario scenario = ProbeScenario::kHighDim;
  std::vector<ProbeRow> rows;
  std::vector<KernelSweepRow> sweep;
};

// Stability averaged over the probe units of a GBM trained on a nonlinear
// synthetic portfolio with the given shape.
ProbeRow StabilityOnSynthetic(std::size_t n_features, double correlation, const ProbeSpec& spec);

// Local slope of `blackbox` (1 feature, standard-normal training stats) at
// `unit` for each width multiplier.
std::vector<KernelSweepRow> KernelSweep(const BlackBox& blackbox, double unit,
                                        const ProbeSpec& spec);

ProbeReport WeaknessProbe(ProbeScenario scenario, const ProbeSpec& spec);

std::string ProbeReportToJson(const ProbeReport& report);

}  // namespace creditrisk
