#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "creditrisk/dataset.hpp"

namespace creditrisk {

// Anything that maps a feature vector to a PD.
using BlackBox = std::function<double(std::span<const double>)>;

// Training-sample statistics that define the standardized space LIME works
// in.
struct FeatureStats {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> std;  // population standard deviation
  std::vector<double> min;
  std::vector<double> max;
  // 25/50/75% quantiles, used by the quartile-bin mode.
  std::vector<std::array<double, 3>> quartiles;

  std::size_t size() const { return names.size(); }
};

FeatureStats ComputeFeatureStats(const Dataset& data);

enum class PerturbationMode {
  // unit + Gaussian noise with per-feature training std; the surrogate sees
  // standardized coordinates.
  kContinuous,
  // Each feature falls in a training quartile bin drawn uniformly; the
  // surrogate sees indicators "same bin as the unit".
  kQuartileBins,
};

struct LimeConfig {
  int n_samples = 5000;
  // <= 0 selects 0.75 * sqrt(p).
  double kernel_width = 0.0;
  int n_features_shown = 7;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  PerturbationMode mode = PerturbationMode::kContinuous;

  double ResolvedKernelWidth(std::size_t n_features) const;
};

struct Neighborhood {
  Matrix samples;        // n_samples x p, original units; row 0 is the unit
  Matrix interpretable;  // what the surrogate is fit on
  Vector weights;        // exp(-d^2 / width^2), d measured in `interpretable`
};

// Deterministic given config.seed. Throws kInvalidArgument for a feature with
// zero spread.
Neighborhood SampleNeighborhood(std::span<const double> unit, const FeatureStats& stats,
                                const LimeConfig& config);

struct Contribution {
  std::size_t feature_index = 0;
  std::string feature_name;
  // Human-readable condition, e.g. "x3 <= -0.67" in quartile-bin mode.
  std::string description;
  double coefficient = 0.0;   // surrogate coefficient in interpretable space
  double contribution = 0.0;  // coefficient * unit's interpretable value
};

struct Explanation {
  std::string unit_id;
  double blackbox_prediction = 0.0;
  // Surrogate evaluated at the unit. Not clamped to [0,1].
  double surrogate_prediction = 0.0;
  double intercept = 0.0;
  // Every feature, by descending |contribution| then feature index.
  // intercept + sum of all contributions == surrogate_prediction.
  std::vector<Contribution> contributions;
  double surrogate_r_squared = 0.0;
  double kernel_width = 0.0;
  LimeConfig config;
  // Continuous mode: the surrogate's slope per unit of each original
  // feature, in feature order. Empty in quartile-bin mode.
  std::vector<double> local_slopes;

  std::span<const Contribution> Shown() const;
};

Explanation Explain(const BlackBox& blackbox, std::span<const double> unit,
                    const FeatureStats& stats, const LimeConfig& config,
                    const std::string& unit_id = "");

struct StabilityReport {
  std::string unit_id;
  int runs = 0;
  // Mean pairwise Jaccard overlap of the shown feature sets.
  double topk_overlap = 0.0;
  // Per feature (feature order): std of its contribution across runs.
  std::vector<double> coefficient_dispersion;
  double mean_r_squared = 0.0;
  // Mean over runs of the largest |contribution|.
  double mean_abs_top_contribution = 0.0;
  std::vector<std::vector<std::string>> shown_features;  // per run

  double MeanDispersion() const;
};

// Runs Explain with seeds seed, seed+1, ... (or the same seed every time when
// `same_seed` is set).
StabilityReport Stability(const BlackBox& blackbox, std::span<const double> unit,
                          const FeatureStats& stats, const LimeConfig& config, int runs,
                          const std::string& unit_id = "", bool same_seed = false);

double Jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

std::string ExplanationToJson(const Explanation& explanation);
Explanation ExplanationFromJson(const std::string& text);
std::string StabilityToJson(const StabilityReport& report);

}  // namespace creditrisk
