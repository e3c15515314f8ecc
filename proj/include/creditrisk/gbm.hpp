#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "creditrisk/dataset.hpp"

namespace creditrisk {

struct GbmConfig {
  int n_trees = 300;
  int max_depth = 3;  // 1 = stumps
  double learning_rate = 0.1;
  int min_samples_leaf = 20;
  double subsample_fraction = 1.0;
  std::uint64_t seed = 0;
};

// Regression tree stored in preorder. Node 0 is the root; a node with
// feature < 0 is a leaf. Rows with x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf raw-score contribution

  bool is_leaf() const { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  double Predict(const double* x) const;
  int LeafIndex(const double* x) const;
  int Depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

// Binomial-deviance gradient boosting. The raw score is
//
//   F(x) = initial_score + sum_k tree_weights[k] * tree_k(x)
//
// and PD = sigmoid(F). Each tree_weights[k] equals the learning rate.
struct BoostedEnsemble {
  std::vector<std::string> feature_names;
  double initial_score = 0.0;  // log-odds of the training bad rate
  std::vector<RegressionTree> trees;
  std::vector<double> tree_weights;
  GbmConfig config;
  // Training deviance after 0..n_trees trees.
  std::vector<double> training_deviance;

  std::size_t num_features() const { return feature_names.size(); }
};

// Each stage fits a depth-limited least-squares tree to the residuals
// y - sigmoid(F), with one Newton step sum(r) / sum(p(1-p)) per leaf.
//
// Splits are exhaustive over midpoints between consecutive distinct values;
// equal gains resolve to the lowest feature index, then the lowest threshold.
BoostedEnsemble FitGbm(const Dataset& train, const GbmConfig& config = {});

double PredictRaw(const BoostedEnsemble& model, std::span<const double> x);
double PredictPd(const BoostedEnsemble& model, std::span<const double> x);

// Raw score using only the first `n_trees` trees.
double PredictRawTruncated(const BoostedEnsemble& model, std::span<const double> x,
                           std::size_t n_trees);

// Deviance -2 log L of the ensemble truncated to 0..n_trees trees.
std::vector<double> StagedDeviance(const BoostedEnsemble& model, const Dataset& data);

// -2 sum(y log p + (1-y) log(1-p)) with p = sigmoid(raw), computed on the
// raw scale.
double BinomialDeviance(const std::vector<double>& raw, const std::vector<int>& target);

// Best squared-error split of `residuals` over the rows in `rows`.
struct SplitCandidate {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // reduction of the residual sum of squares
};
SplitCandidate FindBestSplit(const Matrix& x, const std::vector<double>& residuals,
                             const std::vector<std::size_t>& rows, int min_samples_leaf);

std::string GbmToJson(const BoostedEnsemble& model);
BoostedEnsemble GbmFromJson(const std::string& text);
void SaveGbm(const BoostedEnsemble& model, const std::filesystem::path& path);
BoostedEnsemble LoadGbm(const std::filesystem::path& path);

}  // namespace creditrisk
