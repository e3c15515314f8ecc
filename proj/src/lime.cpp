#include "creditrisk/lime.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "creditrisk/error.hpp"
#include "creditrisk/ridge.hpp"

namespace creditrisk {

using json = nlohmann::json;

namespace {

double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

int QuartileBin(double v, const std::array<double, 3>& q) {
  if (v <= q[0]) return 0;
  if (v <= q[1]) return 1;
  if (v <= q[2]) return 2;
  return 3;
}

std::string Short(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 4);
  return std::string(buf, end);
}

std::string BinDescription(const std::string& name, int bin, const std::array<double, 3>& q) {
  switch (bin) {
    case 0: return name + " <= " + Short(q[0]);
    case 1: return Short(q[0]) + " < " + name + " <= " + Short(q[1]);
    case 2: return Short(q[1]) + " < " + name + " <= " + Short(q[2]);
    default: return name + " > " + Short(q[2]);
  }
}

void ValidateInputs(std::span<const double> unit, const FeatureStats& stats,
                    const LimeConfig& config) {
  const std::size_t p = stats.size();
  if (unit.size() != p) {
    throw Error(ErrorKind::kDimensionMismatch,
                "unit has " + std::to_string(unit.size()) + " features, stats have " +
                    std::to_string(p));
  }
  for (double v : unit) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kNumeric, "unit has a non-finite feature");
  }
  if (config.n_samples < static_cast<int>(p) + 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "n_samples must be at least p + 2 = " + std::to_string(p + 2));
  }
  if (!(config.lambda >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "lambda must be >= 0");
  if (config.n_features_shown < 0) {
    throw Error(ErrorKind::kInvalidArgument, "n_features_shown must be >= 0");
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (!(stats.std[j] > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "feature '" + stats.names[j] + "' has zero spread; exclude it first");
    }
  }
}

json ContributionToJson(const Contribution& c) {
  return {{"feature_index", c.feature_index},
          {"feature", c.feature_name},
          {"description", c.description},
          {"coefficient", c.coefficient},
          {"contribution", c.contribution}};
}

const char* ModeName(PerturbationMode mode) {
  return mode == PerturbationMode::kContinuous ? "continuous" : "quartile_bins";
}

}  // namespace

FeatureStats ComputeFeatureStats(const Dataset& data) {
  const std::size_t p = data.num_features();
  FeatureStats stats;
  stats.names = data.feature_names();
  stats.mean.resize(p);
  stats.std.resize(p);
  stats.min.resize(p);
  stats.max.resize(p);
  stats.quartiles.resize(p);
  if (data.num_rows() == 0) {
    throw Error(ErrorKind::kInvalidArgument, "feature statistics need at least one row");
  }
  const auto summary = Summarize(data);
  for (std::size_t j = 0; j < p; ++j) {
    stats.mean[j] = summary.features[j].mean;
    stats.std[j] = summary.features[j].std;
    stats.min[j] = summary.features[j].min;
    stats.max[j] = summary.features[j].max;
    std::vector<double> col(data.features().col(j).begin(), data.features().col(j).end());
    std::sort(col.begin(), col.end());
    stats.quartiles[j] = {Quantile(col, 0.25), Quantile(col, 0.5), Quantile(col, 0.75)};
  }
  return stats;
}

double LimeConfig::ResolvedKernelWidth(std::size_t n_features) const {
  return kernel_width > 0.0 ? kernel_width : 0.75 * std::sqrt(static_cast<double>(n_features));
}

Neighborhood SampleNeighborhood(std::span<const double> unit, const FeatureStats& stats,
                                const LimeConfig& config) {
  ValidateInputs(unit, stats, config);
  const std::size_t p = stats.size();
  const auto n = static_cast<std::size_t>(config.n_samples);
  const double width = config.ResolvedKernelWidth(p);

  Neighborhood hood;
  hood.samples.resize(n, p);
  hood.interpretable.resize(n, p);
  hood.weights.resize(n);

  std::mt19937_64 rng(config.seed);
  if (config.mode == PerturbationMode::kContinuous) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        hood.samples(i, j) = i == 0 ? unit[j] : unit[j] + stats.std[j] * normal(rng);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        hood.interpretable(i, j) = (hood.samples(i, j) - stats.mean[j]) / stats.std[j];
        const double d = (hood.samples(i, j) - unit[j]) / stats.std[j];
        d2 += d * d;
      }
      hood.weights[i] = std::exp(-d2 / (width * width));
    }
    return hood;
  }

  std::uniform_int_distribution<int> pick_bin(0, 3);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double mismatches = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const auto& q = stats.quartiles[j];
      const int unit_bin = QuartileBin(unit[j], q);
      if (i == 0) {
        hood.samples(i, j) = unit[j];
        hood.interpretable(i, j) = 1.0;
        continue;
      }
      const int bin = pick_bin(rng);
      const double lo = bin == 0 ? stats.min[j] : q[bin - 1];
      const double hi = bin == 3 ? stats.max[j] : q[bin];
      const double u = uniform(rng);
      double value = lo + u * (hi - lo);
      // Keep the drawn value inside its bin under the `<=` edges.
      if (bin > 0 && value <= lo) value = std::nextafter(lo, hi + 1.0);
      hood.samples(i, j) = value;
      const bool same = QuartileBin(value, q) == unit_bin;
      hood.interpretable(i, j) = same ? 1.0 : 0.0;
      mismatches += same ? 0.0 : 1.0;
    }
    hood.weights[i] = std::exp(-mismatches / (width * width));
  }
  return hood;
}

std::span<const Contribution> Explanation::Shown() const {
  const auto k = std::min<std::size_t>(contributions.size(),
                                       static_cast<std::size_t>(config.n_features_shown));
  return {contributions.data(), k};
}

Explanation Explain(const BlackBox& blackbox, std::span<const double> unit,
                    const FeatureStats& stats, const LimeConfig& config,
                    const std::string& unit_id) {
  const Neighborhood hood = SampleNeighborhood(unit, stats, config);
  const std::size_t p = stats.size();
  const auto n = hood.samples.rows();

  Vector response(n);
  std::vector<double> row(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) row[j] = hood.samples(i, j);
    response[i] = blackbox(row);
    if (!std::isfinite(response[i])) {
      throw Error(ErrorKind::kNumeric,
                  "black box returned a non-finite value on sample " + std::to_string(i));
    }
  }

  const RidgeModel surrogate = FitRidge(hood.interpretable, response, hood.weights, config.lambda);

  Explanation out;
  out.unit_id = unit_id;
  out.blackbox_prediction = response[0];
  out.intercept = surrogate.coefficients[0];
  out.surrogate_r_squared = surrogate.r_squared;
  out.kernel_width = config.ResolvedKernelWidth(p);
  out.config = config;

  out.surrogate_prediction = out.intercept;
  out.contributions.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    auto& c = out.contributions[j];
    c.feature_index = j;
    c.feature_name = stats.names[j];
    c.coefficient = surrogate.coefficients[j + 1];
    c.contribution = c.coefficient * hood.interpretable(0, j);
    out.surrogate_prediction += c.contribution;
    if (config.mode == PerturbationMode::kContinuous) {
      c.description = stats.names[j] + " = " + Short(unit[j]);
    } else {
      c.description =
          BinDescription(stats.names[j], QuartileBin(unit[j], stats.quartiles[j]), stats.quartiles[j]);
    }
  }
  if (config.mode == PerturbationMode::kContinuous) {
    out.local_slopes.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
      out.local_slopes[j] = surrogate.coefficients[j + 1] / stats.std[j];
    }
  }
  std::stable_sort(out.contributions.begin(), out.contributions.end(),
                   [](const Contribution& a, const Contribution& b) {
                     return std::abs(a.contribution) > std::abs(b.contribution);
                   });
  return out;
}

double Jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::set<std::string> sa(a.begin(), a.end());
  const std::set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& s : sa) common += sb.count(s);
  return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
}

double StabilityReport::MeanDispersion() const {
  if (coefficient_dispersion.empty()) return 0.0;
  double s = 0.0;
  for (double d : coefficient_dispersion) s += d;
  return s / static_cast<double>(coefficient_dispersion.size());
}

StabilityReport Stability(const BlackBox& blackbox, std::span<const double> unit,
                          const FeatureStats& stats, const LimeConfig& config, int runs,
                          const std::string& unit_id, bool same_seed) {
  if (runs < 2) throw Error(ErrorKind::kInvalidArgument, "stability needs at least 2 runs");
  const std::size_t p = stats.size();

  StabilityReport report;
  report.unit_id = unit_id;
  report.runs = runs;
  std::vector<std::vector<double>> by_feature(p);
  for (int r = 0; r < runs; ++r) {
    LimeConfig run_config = config;
    run_config.seed = same_seed ? config.seed : config.seed + static_cast<std::uint64_t>(r);
    const Explanation e = Explain(blackbox, unit, stats, run_config, unit_id);
    std::vector<std::string> shown;
    for (const auto& c : e.Shown()) shown.push_back(c.feature_name);
    report.shown_features.push_back(std::move(shown));
    for (const auto& c : e.contributions) by_feature[c.feature_index].push_back(c.contribution);
    report.mean_r_squared += e.surrogate_r_squared / runs;
    if (!e.contributions.empty()) {
      report.mean_abs_top_contribution += std::abs(e.contributions[0].contribution) / runs;
    }
  }

  double overlap = 0.0;
  int pairs = 0;
  for (int a = 0; a < runs; ++a) {
    for (int b = a + 1; b < runs; ++b) {
      overlap += Jaccard(report.shown_features[a], report.shown_features[b]);
      ++pairs;
    }
  }
  report.topk_overlap = overlap / pairs;

  report.coefficient_dispersion.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    // Welford: identical runs give exactly zero.
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < by_feature[j].size(); ++k) {
      const double x = by_feature[j][k];
      const double delta = x - mean;
      mean += delta / static_cast<double>(k + 1);
      m2 += delta * (x - mean);
    }
    report.coefficient_dispersion[j] = std::sqrt(m2 / static_cast<double>(by_feature[j].size()));
  }
  return report;
}

// ---------------------------------------------------------------------------

std::string ExplanationToJson(const Explanation& e) {
  json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "explanation";
  doc["unit_id"] = e.unit_id;
  doc["blackbox_prediction"] = e.blackbox_prediction;
  doc["surrogate_prediction"] = e.surrogate_prediction;
  doc["surrogate_r_squared"] = e.surrogate_r_squared;
  doc["intercept"] = e.intercept;
  doc["kernel_width"] = e.kernel_width;
  doc["config"] = {{"n_samples", e.config.n_samples},
                   {"kernel_width", e.config.kernel_width},
                   {"n_features_shown", e.config.n_features_shown},
                   {"lambda", e.config.lambda},
                   {"seed", e.config.seed},
                   {"mode", ModeName(e.config.mode)}};
  json all = json::array();
  for (const auto& c : e.contributions) all.push_back(ContributionToJson(c));
  json shown = json::array();
  for (const auto& c : e.Shown()) shown.push_back(ContributionToJson(c));
  doc["contributions"] = std::move(all);
  doc["shown"] = std::move(shown);
  if (!e.local_slopes.empty()) doc["local_slopes"] = e.local_slopes;
  return doc.dump(2) + "\n";
}

Explanation ExplanationFromJson(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("kind").get<std::string>() != "explanation") {
      throw Error(ErrorKind::kMalformedDocument, "not an explanation document");
    }
    Explanation e;
    e.unit_id = doc.at("unit_id").get<std::string>();
    e.blackbox_prediction = doc.at("blackbox_prediction").get<double>();
    e.surrogate_prediction = doc.at("surrogate_prediction").get<double>();
    e.surrogate_r_squared = doc.at("surrogate_r_squared").get<double>();
    e.intercept = doc.at("intercept").get<double>();
    e.kernel_width = doc.at("kernel_width").get<double>();
    const auto& c = doc.at("config");
    e.config.n_samples = c.at("n_samples").get<int>();
    e.config.kernel_width = c.at("kernel_width").get<double>();
    e.config.n_features_shown = c.at("n_features_shown").get<int>();
    e.config.lambda = c.at("lambda").get<double>();
    e.config.seed = c.at("seed").get<std::uint64_t>();
    e.config.mode = c.at("mode").get<std::string>() == "continuous"
                        ? PerturbationMode::kContinuous
                        : PerturbationMode::kQuartileBins;
    for (const auto& item : doc.at("contributions")) {
      Contribution k;
      k.feature_index = item.at("feature_index").get<std::size_t>();
      k.feature_name = item.at("feature").get<std::string>();
      k.description = item.at("description").get<std::string>();
      k.coefficient = item.at("coefficient").get<double>();
      k.contribution = item.at("contribution").get<double>();
      e.contributions.push_back(std::move(k));
    }
    e.local_slopes = doc.value("local_slopes", std::vector<double>{});
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::kMalformedDocument, std::string("bad explanation document: ") + ex.what());
  }
}

std::string StabilityToJson(const StabilityReport& r) {
  json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "stability";
  doc["unit_id"] = r.unit_id;
  doc["runs"] = r.runs;
  doc["topk_overlap"] = r.topk_overlap;
  doc["coefficient_dispersion"] = r.coefficient_dispersion;
  doc["mean_dispersion"] = r.MeanDispersion();
  doc["mean_r_squared"] = r.mean_r_squared;
  doc["mean_abs_top_contribution"] = r.mean_abs_top_contribution;
  doc["shown_features"] = r.shown_features;
  return doc.dump(2) + "\n";
}

}  // namespace creditrisk
