#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace creditrisk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Numeric feature matrix with a binary default indicator (1 = default).
//
// Instances are validated on construction and immutable afterwards: the
// target is exactly 0/1, every feature is finite, and the name/id vectors
// match the matrix shape.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix features, std::vector<int> target,
          std::vector<std::string> feature_names,
          std::vector<std::string> row_ids);

  const Matrix& features() const { return features_; }
  const std::vector<int>& target() const { return target_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& row_ids() const { return row_ids_; }

  std::size_t num_rows() const { return target_.size(); }
  std::size_t num_features() const { return feature_names_.size(); }
  std::size_t num_bads() const;
  double bad_rate() const;

  std::vector<double> Row(std::size_t i) const;

  // Rows in the given order; ids are carried along.
  Dataset Subset(const std::vector<std::size_t>& rows) const;

 private:
  Matrix features_;
  std::vector<int> target_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> row_ids_;
};

// ---------------------------------------------------------------------------
// CSV

struct CsvOptions {
  std::string target_column = "default";
  // Used as row ids when present in the header. Otherwise rows are numbered
  // from 0 in file order.
  std::string id_column = "row_id";
};

// Comma separated, header mandatory, '.' decimal point, no quoting. All
// columns except target/id become features in header order.
Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options = {});

// Writes `row_id,<features...>,<target>` with shortest round-trip doubles, so
// LoadCsv(WriteCsv(d)) reproduces d bit for bit.
void WriteCsv(const Dataset& data, const std::filesystem::path& path,
              const CsvOptions& options = {});

// ---------------------------------------------------------------------------
// Stratified split

struct SplitSpec {
  double train_fraction = 0.70;
  std::uint64_t seed = 0;
  // Max |bad_rate(train) - bad_rate(test)|.
  double balance_check_tolerance = 0.005;
};

struct SplitResult {
  Dataset train;
  Dataset test;
};

// Each class is shuffled independently and cut so that the train set holds
// round(train_fraction * n) rows with round(train_fraction * n_bad) bads.
SplitResult Split(const Dataset& data, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Synthetic credit portfolio

enum class Nonlinearity { kLinear, kNonlinear };

struct SyntheticSpec {
  std::size_t n_rows = 56311;
  std::size_t n_features = 20;
  double bad_rate_target = 0.03;
  Nonlinearity nonlinearity = Nonlinearity::kNonlinear;
  // Common pairwise correlation of the Gaussian features.
  double correlation = 0.0;
  std::uint64_t seed = 0;
};

// The generating log-odds function. Features are standard normal with
// equicorrelation `correlation`.
//
//   linear:    eta = intercept + sum_j slopes[j] * x_j
//   nonlinear: eta = intercept + sum_j slopes[j] * x_j
//                    + interaction * x_0 * x_1
//                    + step * [x_2 > step_threshold]
//                    + curvature * (x_3^2 - 1)
//
// The nonlinear terms reference features 0..3 (fewer when p < 4, in which
// case the missing terms are dropped).
struct GroundTruth {
  Nonlinearity nonlinearity = Nonlinearity::kLinear;
  double intercept = 0.0;
  std::vector<double> slopes;
  double interaction = 0.0;
  double step = 0.0;
  double step_threshold = 0.0;
  double curvature = 0.0;

  double LogOdds(const double* x) const;
  double Pd(const double* x) const;
};

struct SyntheticData {
  Dataset data;
  GroundTruth truth;
};

// Deterministic in the settings (including seed). The intercept is calibrated by
// bisection so that the realised bad rate lies within half a percentage
// point of bad_rate_target; throws kCalibration when that is impossible.
SyntheticData GenerateSynthetic(const SyntheticSpec& spec);

// ---------------------------------------------------------------------------
// Summary

struct FeatureSummary {
  std::string name;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
};

struct DatasetSummary {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::size_t n_bads = 0;
  double bad_rate = 0.0;
  std::vector<FeatureSummary> features;
};

DatasetSummary Summarize(const Dataset& data);

}  // namespace creditrisk
