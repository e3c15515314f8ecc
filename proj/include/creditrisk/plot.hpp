#pragma once

#include <string>
#include <vector>

#include "creditrisk/lime.hpp"
#include "creditrisk/metrics.hpp"

namespace creditrisk {

struct LorenzSeries {
  std::string label;
  EvalReport report;
};

// Lorenz curves with the random-model diagonal and a legend carrying each
// series' Gini. Curves are thinned to at most `max_points` vertices.
std::string LorenzSvg(const std::vector<LorenzSeries>& series, std::size_t max_points = 1000);

// Horizontal signed bars for the shown contributions. Positive contributions
// push towards "bad payer" and are drawn right of the axis in red; negative
// ones towards "good payer", left of the axis in green.
std::string ExplanationSvg(const Explanation& explanation);

}  // namespace creditrisk
