#include "creditrisk/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "creditrisk/error.hpp"
#include "creditrisk/glm.hpp"

namespace creditrisk {

using json = nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

double Softplus(double eta) {
  return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

void CheckWidth(const BoostedEnsemble& model, std::size_t width) {
  if (width != model.num_features()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "expected " + std::to_string(model.num_features()) + " features, got " +
                    std::to_string(width));
  }
}

// Midpoint between two consecutive distinct sorted values that still sends
// `lo` left and `hi` right under the `x <= threshold` rule.
double Midpoint(double lo, double hi) {
  const double mid = lo + 0.5 * (hi - lo);
  return (mid >= hi || mid < lo) ? lo : mid;
}

// Scans one feature whose node rows are given in ascending value order and
// updates `best` when a strictly larger gain is found.
template <typename ValueAt, typename ResidualAt>
void ScanFeature(int feature, std::size_t count, ValueAt value_at, ResidualAt residual_at,
                 double sum, int min_samples_leaf, SplitCandidate* best) {
  const double n = static_cast<double>(count);
  const double parent = sum * sum / n;
  double left_sum = 0.0;
  const auto min_leaf = static_cast<std::size_t>(min_samples_leaf);
  for (std::size_t k = 0; k + 1 < count; ++k) {
    left_sum += residual_at(k);
    const std::size_t n_left = k + 1;
    const std::size_t n_right = count - n_left;
    if (n_left < min_leaf) continue;
    if (n_right < min_leaf) break;
    const double lo = value_at(k);
    const double hi = value_at(k + 1);
    if (!(lo < hi)) continue;
    const double right_sum = sum - left_sum;
    const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                        right_sum * right_sum / static_cast<double>(n_right) - parent;
    if (!best->valid || gain > best->gain) {
      best->valid = true;
      best->feature = feature;
      best->threshold = Midpoint(lo, hi);
      best->gain = gain;
    }
  }
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<std::vector<std::uint32_t>>& sorted,
              const std::vector<double>& residual, const std::vector<double>& hessian,
              const GbmConfig& config)
      : x_(x), residual_(residual), hessian_(hessian), config_(config), work_(sorted) {
    go_left_.assign(x.rows(), 0);
  }

  RegressionTree Build() {
    nodes_.clear();
    const std::size_t count = work_.empty() ? 0 : work_[0].size();
    Grow(0, count, 1);
    return RegressionTree(std::move(nodes_));
  }

 private:
  int Grow(std::size_t begin, std::size_t end, int depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t count = end - begin;
    const auto& rows = work_[0];

    double sum = 0.0;
    double sum_sq = 0.0;
    double hess = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      sum += residual_[rows[k]];
      sum_sq += residual_[rows[k]] * residual_[rows[k]];
      hess += hessian_[rows[k]];
    }

    SplitCandidate best;
    if (depth <= config_.max_depth &&
        count >= 2 * static_cast<std::size_t>(config_.min_samples_leaf)) {
      for (std::size_t f = 0; f < work_.size(); ++f) {
        const auto* seg = work_[f].data() + begin;
        ScanFeature(
            static_cast<int>(f), count, [&](std::size_t k) { return x_(seg[k], f); },
            [&](std::size_t k) { return residual_[seg[k]]; }, sum, config_.min_samples_leaf,
            &best);
      }
    }
    // Rounding noise can fake a tiny gain on a pure node.
    if (!best.valid || !(best.gain > 1e-12 * std::max(sum_sq, 1e-300))) {
      nodes_[index].value = hess > 0.0 ? sum / hess : 0.0;
      return index;
    }

    std::size_t n_left = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const auto row = rows[k];
      go_left_[row] = x_(row, best.feature) <= best.threshold;
      n_left += go_left_[row];
    }
    for (auto& list : work_) {
      buffer_.assign(list.begin() + begin, list.begin() + end);
      auto* out = list.data() + begin;
      std::size_t l = 0;
      std::size_t r = n_left;
      for (auto row : buffer_) out[go_left_[row] ? l++ : r++] = row;
    }

    nodes_[index].feature = best.feature;
    nodes_[index].threshold = best.threshold;
    const int left = Grow(begin, begin + n_left, depth + 1);
    const int right = Grow(begin + n_left, end, depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
  }

  const Matrix& x_;
  const std::vector<double>& residual_;
  const std::vector<double>& hessian_;
  const GbmConfig& config_;
  std::vector<std::vector<std::uint32_t>> work_;
  std::vector<std::uint8_t> go_left_;
  std::vector<std::uint32_t> buffer_;
  std::vector<TreeNode> nodes_;
};

void ValidateConfig(const GbmConfig& c) {
  if (c.n_trees < 0 || c.max_depth < 1 || !(c.learning_rate > 0.0 && c.learning_rate <= 1.0) ||
      c.min_samples_leaf < 1 || !(c.subsample_fraction > 0.0 && c.subsample_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "invalid GbmConfig: need n_trees >= 0, max_depth >= 1, learning_rate in (0,1], "
                "min_samples_leaf >= 1, subsample_fraction in (0,1]");
  }
}

json TreeToJson(const RegressionTree& tree) {
  json out = json::array();
  for (const auto& node : tree.nodes()) {
    if (node.is_leaf()) {
      out.push_back(json::array({node.value}));
    } else {
      out.push_back(json::array({node.feature, node.threshold}));
    }
  }
  return out;
}

int ParsePreorder(const json& encoded, std::size_t& cursor, std::vector<TreeNode>& nodes) {
  if (cursor >= encoded.size()) {
    throw Error(ErrorKind::kMalformedDocument, "truncated tree encoding");
  }
  const auto& item = encoded[cursor++];
  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (item.size() == 1) {
    nodes[index].value = item[0].get<double>();
    return index;
  }
  if (item.size() != 2) throw Error(ErrorKind::kMalformedDocument, "bad tree node");
  nodes[index].feature = item[0].get<int>();
  nodes[index].threshold = item[1].get<double>();
  const int left = ParsePreorder(encoded, cursor, nodes);
  const int right = ParsePreorder(encoded, cursor, nodes);
  nodes[index].left = left;
  nodes[index].right = right;
  return index;
}

}  // namespace

// ---------------------------------------------------------------------------

int RegressionTree::LeafIndex(const double* x) const {
  int i = 0;
  while (!nodes_[i].is_leaf()) {
    i = x[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  }
  return i;
}

double RegressionTree::Predict(const double* x) const { return nodes_[LeafIndex(x)].value; }

int RegressionTree::Depth() const {
  std::vector<int> depth(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf()) continue;
    depth[nodes_[i].left] = depth[i] + 1;
    depth[nodes_[i].right] = depth[i] + 1;
    deepest = std::max(deepest, depth[i] + 1);
  }
  return deepest;
}

double BinomialDeviance(const std::vector<double>& raw, const std::vector<int>& target) {
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) total += Softplus(raw[i]) - target[i] * raw[i];
  return 2.0 * total;
}

SplitCandidate FindBestSplit(const Matrix& x, const std::vector<double>& residuals,
                             const std::vector<std::size_t>& rows, int min_samples_leaf) {
  SplitCandidate best;
  double sum = 0.0;
  for (auto r : rows) sum += residuals[r];
  std::vector<std::size_t> order(rows);
  for (Eigen::Index f = 0; f < x.cols(); ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return x(a, f) < x(b, f) || (x(a, f) == x(b, f) && a < b);
    });
    ScanFeature(
        static_cast<int>(f), order.size(), [&](std::size_t k) { return x(order[k], f); },
        [&](std::size_t k) { return residuals[order[k]]; }, sum, min_samples_leaf, &best);
  }
  return best;
}

BoostedEnsemble FitGbm(const Dataset& train, const GbmConfig& config) {
  ValidateConfig(config);
  const std::size_t n = train.num_rows();
  const std::size_t p = train.num_features();
  const std::size_t bads = train.num_bads();
  if (bads == 0 || bads == n) {
    throw Error(ErrorKind::kSingleClass, "boosting needs both classes present");
  }
  if (n < 2 * static_cast<std::size_t>(config.min_samples_leaf)) {
    throw Error(ErrorKind::kInvalidArgument,
                "need at least 2 * min_samples_leaf = " +
                    std::to_string(2 * config.min_samples_leaf) + " rows");
  }

  const Matrix& x = train.features();
  const auto& y = train.target();

  BoostedEnsemble model;
  model.feature_names = train.feature_names();
  model.config = config;
  model.initial_score =
      std::log(static_cast<double>(bads) / static_cast<double>(n - bads));

  std::vector<std::vector<std::uint32_t>> sorted(p, std::vector<std::uint32_t>(n));
  for (std::size_t f = 0; f < p; ++f) {
    std::iota(sorted[f].begin(), sorted[f].end(), 0u);
    std::stable_sort(sorted[f].begin(), sorted[f].end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
  }

  std::vector<double> raw(n, model.initial_score);
  std::vector<double> residual(n);
  std::vector<double> hessian(n);
  model.training_deviance.push_back(BinomialDeviance(raw, y));

  std::mt19937_64 rng(config.seed);
  const bool subsample = config.subsample_fraction < 1.0;
  const auto sample_size = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(config.subsample_fraction * static_cast<double>(n))));
  std::vector<std::uint32_t> shuffled(n);
  std::iota(shuffled.begin(), shuffled.end(), 0u);
  std::vector<std::uint8_t> in_sample(n, 1);
  std::vector<std::vector<std::uint32_t>> sample_sorted;

  for (int k = 0; k < config.n_trees; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double prob = Logistic(raw[i]);
      residual[i] = y[i] - prob;
      hessian[i] = prob * (1.0 - prob);
    }

    const std::vector<std::vector<std::uint32_t>>* lists = &sorted;
    if (subsample) {
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      std::fill(in_sample.begin(), in_sample.end(), 0);
      for (std::size_t s = 0; s < sample_size; ++s) in_sample[shuffled[s]] = 1;
      sample_sorted.assign(p, {});
      for (std::size_t f = 0; f < p; ++f) {
        sample_sorted[f].reserve(sample_size);
        for (auto row : sorted[f]) {
          if (in_sample[row]) sample_sorted[f].push_back(row);
        }
      }
      lists = &sample_sorted;
    }

    RegressionTree tree;
    if (p == 0) {
      // No features: a single leaf over the whole sample.
      double sum = 0.0, hess = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!in_sample[i]) continue;
        sum += residual[i];
        hess += hessian[i];
      }
      TreeNode leaf;
      leaf.value = hess > 0.0 ? sum / hess : 0.0;
      tree = RegressionTree({leaf});
    } else {
      TreeBuilder builder(x, *lists, residual, hessian, config);
      tree = builder.Build();
    }

    std::vector<double> row(p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < p; ++f) row[f] = x(i, f);
      raw[i] += config.learning_rate * tree.Predict(row.data());
    }
    model.trees.push_back(std::move(tree));
    model.tree_weights.push_back(config.learning_rate);
    model.training_deviance.push_back(BinomialDeviance(raw, y));
  }
  return model;
}

double PredictRawTruncated(const BoostedEnsemble& model, std::span<const double> x,
                           std::size_t n_trees) {
  CheckWidth(model, x.size());
  double score = model.initial_score;
  const std::size_t count = std::min(n_trees, model.trees.size());
  for (std::size_t k = 0; k < count; ++k) {
    score += model.tree_weights[k] * model.trees[k].Predict(x.data());
  }
  return score;
}

double PredictRaw(const BoostedEnsemble& model, std::span<const double> x) {
  return PredictRawTruncated(model, x, model.trees.size());
}

double PredictPd(const BoostedEnsemble& model, std::span<const double> x) {
  return Logistic(PredictRaw(model, x));
}

std::vector<double> StagedDeviance(const BoostedEnsemble& model, const Dataset& data) {
  CheckWidth(model, data.num_features());
  const std::size_t n = data.num_rows();
  std::vector<double> raw(n, model.initial_score);
  std::vector<double> out;
  out.reserve(model.trees.size() + 1);
  out.push_back(BinomialDeviance(raw, data.target()));
  std::vector<double> row(data.num_features());
  for (std::size_t k = 0; k < model.trees.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < row.size(); ++f) row[f] = data.features()(i, f);
      raw[i] += model.tree_weights[k] * model.trees[k].Predict(row.data());
    }
    out.push_back(BinomialDeviance(raw, data.target()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string GbmToJson(const BoostedEnsemble& model) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "gbm";
  doc["feature_names"] = model.feature_names;
  doc["config"] = {
      {"n_trees", model.config.n_trees},
      {"max_depth", model.config.max_depth},
      {"learning_rate", model.config.learning_rate},
      {"min_samples_leaf", model.config.min_samples_leaf},
      {"subsample_fraction", model.config.subsample_fraction},
      {"seed", model.config.seed},
  };
  doc["initial_score"] = model.initial_score;
  doc["tree_weights"] = model.tree_weights;
  doc["training_deviance"] = model.training_deviance;
  json trees = json::array();
  for (const auto& tree : model.trees) trees.push_back(TreeToJson(tree));
  doc["trees"] = std::move(trees);
  return doc.dump() + "\n";
}

BoostedEnsemble GbmFromJson(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("kind").get<std::string>() != "gbm") {
      throw Error(ErrorKind::kMalformedDocument, "not a gbm model document");
    }
    if (doc.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error(ErrorKind::kMalformedDocument, "unsupported gbm schema_version");
    }
    BoostedEnsemble model;
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    const auto& c = doc.at("config");
    model.config.n_trees = c.at("n_trees").get<int>();
    model.config.max_depth = c.at("max_depth").get<int>();
    model.config.learning_rate = c.at("learning_rate").get<double>();
    model.config.min_samples_leaf = c.at("min_samples_leaf").get<int>();
    model.config.subsample_fraction = c.at("subsample_fraction").get<double>();
    model.config.seed = c.at("seed").get<std::uint64_t>();
    model.initial_score = doc.at("initial_score").get<double>();
    model.tree_weights = doc.at("tree_weights").get<std::vector<double>>();
    model.training_deviance = doc.value("training_deviance", std::vector<double>{});
    for (const auto& encoded : doc.at("trees")) {
      std::vector<TreeNode> nodes;
      std::size_t cursor = 0;
      ParsePreorder(encoded, cursor, nodes);
      if (cursor != encoded.size()) {
        throw Error(ErrorKind::kMalformedDocument, "trailing nodes in tree encoding");
      }
      for (const auto& node : nodes) {
        if (!node.is_leaf() && node.feature >= static_cast<int>(model.num_features())) {
          throw Error(ErrorKind::kMalformedDocument, "tree splits on unknown feature");
        }
      }
      model.trees.emplace_back(std::move(nodes));
    }
    if (model.trees.size() != model.tree_weights.size()) {
      throw Error(ErrorKind::kMalformedDocument, "trees and tree_weights differ in length");
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedDocument, std::string("bad gbm document: ") + e.what());
  }
}

void SaveGbm(const BoostedEnsemble& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << GbmToJson(model);
}

BoostedEnsemble LoadGbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return GbmFromJson(buffer.str());
}

}  // namespace creditrisk
