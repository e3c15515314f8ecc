#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "creditrisk/dataset.hpp"

namespace creditrisk {

struct LorenzPoint {
  double population_share;  // x: share of population, worst scores first
  double bad_share;         // y: share of all bads captured
};

// Discrimination report for one score vector.
//
// The Lorenz (cumulative accuracy) curve orders units by descending score,
// i.e. riskiest first, and has one vertex per group of tied scores. It runs
// from (0,0) to (1,1) and is non-decreasing in both coordinates.
//
// AUC is the Mann-Whitney statistic with ties credited 1/2, which equals the
// trapezoidal area under the ROC curve. Gini is the accuracy ratio 2*AUC - 1.
struct EvalReport {
  std::vector<LorenzPoint> lorenz_points;
  double gini = 0.0;
  double auc = 0.5;
  std::size_t n_good = 0;
  std::size_t n_bad = 0;
};

// Higher score = riskier. Throws on length mismatch, NaN scores or a single
// class.
EvalReport Evaluate(const std::vector<double>& scores, const std::vector<int>& target);

// (gini_a - gini_b) in Gini points.
double GiniDelta(const EvalReport& a, const EvalReport& b);

// Weighted coefficient of determination 1 - sum w (o-p)^2 / sum w (o-mean_w)^2.
// Throws when the observed vector is constant under the weights.
double RSquared(const Vector& predicted, const Vector& observed, const Vector& weights);

std::string EvalReportToJson(const EvalReport& report, const std::string& label);
EvalReport EvalReportFromJson(const std::string& text);

}  // namespace creditrisk
