#include "creditrisk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <json.hpp>

#include "creditrisk/error.hpp"

namespace creditrisk {

using json = nlohmann::json;

EvalReport Evaluate(const std::vector<double>& scores, const std::vector<int>& target) {
  if (scores.size() != target.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "scores and target differ in length");
  }
  const std::size_t n = scores.size();
  EvalReport report;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(scores[i])) {
      throw Error(ErrorKind::kNumeric, "NaN score at index " + std::to_string(i));
    }
    if (target[i] != 0 && target[i] != 1) {
      throw Error(ErrorKind::kNonBinaryTarget, "non-binary target at index " + std::to_string(i));
    }
    (target[i] ? report.n_bad : report.n_good)++;
  }
  if (report.n_bad == 0 || report.n_good == 0) {
    throw Error(ErrorKind::kSingleClass, "evaluation needs both classes present");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  // Twice the Mann-Whitney count: 2 per concordant (bad, good) pair, 1 per
  // tie. Integer arithmetic keeps the statistic exact.
  std::uint64_t twice_concordant = 0;
  std::size_t bads_seen = 0;
  std::size_t goods_seen = 0;
  const auto n_bad = static_cast<double>(report.n_bad);
  const auto n_total = static_cast<double>(n);
  report.lorenz_points.push_back({0.0, 0.0});
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    std::size_t group_bads = 0;
    while (end < n && scores[order[end]] == scores[order[start]]) {
      group_bads += target[order[end]];
      ++end;
    }
    const std::size_t group_goods = (end - start) - group_bads;
    // Bads in this group outrank every good not yet seen, and tie with the
    // goods of the same group.
    const std::size_t goods_below = report.n_good - goods_seen - group_goods;
    twice_concordant += 2 * static_cast<std::uint64_t>(group_bads) * goods_below +
                        static_cast<std::uint64_t>(group_bads) * group_goods;
    bads_seen += group_bads;
    goods_seen += group_goods;
    report.lorenz_points.push_back(
        {static_cast<double>(end) / n_total, static_cast<double>(bads_seen) / n_bad});
    start = end;
  }

  const double pairs = static_cast<double>(report.n_good) * n_bad;
  report.auc = static_cast<double>(twice_concordant) / (2.0 * pairs);
  report.gini = 2.0 * report.auc - 1.0;
  return report;
}

double GiniDelta(const EvalReport& a, const EvalReport& b) { return (a.gini - b.gini) * 100.0; }

double RSquared(const Vector& predicted, const Vector& observed, const Vector& weights) {
  if (predicted.size() != observed.size() || weights.size() != observed.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "r_squared inputs differ in length");
  }
  if ((weights.array() < 0.0).any()) {
    throw Error(ErrorKind::kInvalidArgument, "r_squared weights must be >= 0");
  }
  const double total = weights.sum();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "r_squared weights sum to zero");
  }
  const double mean = weights.dot(observed) / total;
  const double ss_tot = weights.dot((observed.array() - mean).square().matrix());
  if (!(ss_tot > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "r_squared undefined for a constant observed vector");
  }
  const double ss_res = weights.dot((observed - predicted).array().square().matrix());
  return 1.0 - ss_res / ss_tot;
}

std::string EvalReportToJson(const EvalReport& report, const std::string& label) {
  json doc;
  doc["schema_version"] = 1;
  doc["kind"] = "evaluation";
  doc["label"] = label;
  doc["gini"] = report.gini;
  doc["auc"] = report.auc;
  doc["n_good"] = report.n_good;
  doc["n_bad"] = report.n_bad;
  json points = json::array();
  for (const auto& p : report.lorenz_points) points.push_back({p.population_share, p.bad_share});
  doc["lorenz_points"] = std::move(points);
  return doc.dump();
}

EvalReport EvalReportFromJson(const std::string& text) {
  try {
    const json doc = json::parse(text);
    EvalReport report;
    report.gini = doc.at("gini").get<double>();
    report.auc = doc.at("auc").get<double>();
    report.n_good = doc.at("n_good").get<std::size_t>();
    report.n_bad = doc.at("n_bad").get<std::size_t>();
    for (const auto& p : doc.at("lorenz_points")) {
      report.lorenz_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedDocument, std::string("bad evaluation document: ") + e.what());
  }
}

}  // namespace creditrisk
