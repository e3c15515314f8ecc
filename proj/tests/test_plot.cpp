#include <doctest.h>

#include <regex>
#include <string>

#include "creditrisk/plot.hpp"

using namespace creditrisk;

namespace {

std::size_t Count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

// Attribute value of the first element containing `marker`.
double Attr(const std::string& svg, const std::string& marker, const std::string& name) {
  const auto start = svg.find(marker);
  REQUIRE(start != std::string::npos);
  const auto end = svg.find("/>", start);
  const std::string element = svg.substr(start, end - start);
  const std::regex re(" " + name + "=\"([^\"]+)\"");
  std::smatch m;
  REQUIRE(std::regex_search(element, m, re));
  return std::stod(m[1]);
}

Explanation SevenBars() {
  Explanation e;
  e.unit_id = "42";
  e.blackbox_prediction = 0.059;
  e.surrogate_prediction = 0.054;
  e.surrogate_r_squared = 0.738;
  e.intercept = 1.104;
  const double values[] = {-0.5, 0.4, -0.3, 0.2, -0.1, 0.05, -0.02, 0.01, 0.005};
  for (std::size_t j = 0; j < 9; ++j) {
    Contribution c;
    c.feature_index = j;
    c.feature_name = "f" + std::to_string(j);
    c.description = c.feature_name + " = 1";
    c.contribution = values[j];
    e.contributions.push_back(c);
  }
  e.config.n_features_shown = 7;
  return e;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("explanation chart draws exactly the shown bars") {
  const std::string svg = ExplanationSvg(SevenBars());
  CHECK(Count(svg, "<rect class=\"bar ") == 7);
  CHECK(Count(svg, "class=\"bar bad\"") == 3);
  CHECK(Count(svg, "class=\"bar good\"") == 4);
  CHECK(svg.find("f7") == std::string::npos);
  CHECK(svg.find("Model prediction: 0.059") != std::string::npos);
  CHECK(svg.find("Surrogate prediction: 0.054") != std::string::npos);
  CHECK(svg.find("Surrogate R2: 0.738") != std::string::npos);
  CHECK(svg.find("Intercept: 1.104") != std::string::npos);
}

TEST_CASE("negative contributions sit on the good-payer side") {
  const std::string svg = ExplanationSvg(SevenBars());
  const double axis = Attr(svg, "class=\"axis\"", "x1");
  // f0 is negative: the bar ends at the axis and is green.
  const double x0 = Attr(svg, "data-feature=\"f0\"", "x");
  const double w0 = Attr(svg, "data-feature=\"f0\"", "width");
  CHECK(x0 + w0 == doctest::Approx(axis));
  CHECK(x0 < axis);
  CHECK(svg.find("class=\"bar good\" data-feature=\"f0\"") != std::string::npos);
  // f1 is positive: the bar starts at the axis and is red.
  CHECK(Attr(svg, "data-feature=\"f1\"", "x") == doctest::Approx(axis));
  CHECK(svg.find("class=\"bar bad\" data-feature=\"f1\"") != std::string::npos);
  CHECK(svg.find("good payer") != std::string::npos);
  CHECK(svg.find("bad payer") != std::string::npos);
}

TEST_CASE("all-tied scores draw a lorenz curve on the diagonal") {
  EvalReport tied;
  tied.lorenz_points = {{0.0, 0.0}, {1.0, 1.0}};
  tied.gini = 0.0;
  tied.auc = 0.5;
  const std::string svg = LorenzSvg({{"flat", tied}});
  const double x1 = Attr(svg, "class=\"diagonal\"", "x1");
  const double y1 = Attr(svg, "class=\"diagonal\"", "y1");
  const double x2 = Attr(svg, "class=\"diagonal\"", "x2");
  const double y2 = Attr(svg, "class=\"diagonal\"", "y2");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex("class=\"lorenz\"[^>]*points=\"([^\"]+)\"")));
  char expected[96];
  std::snprintf(expected, sizeof(expected), "%.2f,%.2f %.2f,%.2f", x1, y1, x2, y2);
  CHECK(m[1].str() == expected);
  CHECK(svg.find("flat: Gini = 0.0000") != std::string::npos);
}

TEST_CASE("lorenz chart carries one curve and legend entry per series") {
  EvalReport a, b;
  a.lorenz_points = {{0, 0}, {0.1, 0.5}, {1, 1}};
  a.gini = 0.7123;
  b.lorenz_points = {{0, 0}, {0.1, 0.3}, {1, 1}};
  b.gini = 0.6111;
  const std::string svg = LorenzSvg({{"gbm", a}, {"logit", b}});
  CHECK(Count(svg, "<polyline class=\"lorenz\"") == 2);
  CHECK(svg.find("gbm: Gini = 0.7123") != std::string::npos);
  CHECK(svg.find("logit: Gini = 0.6111") != std::string::npos);
  CHECK(Count(svg, "class=\"diagonal\"") == 1);
}

TEST_CASE("long curves are thinned but keep both endpoints") {
  EvalReport r;
  for (int i = 0; i <= 5000; ++i) r.lorenz_points.push_back({i / 5000.0, std::sqrt(i / 5000.0)});
  const std::string svg = LorenzSvg({{"m", r}}, 100);
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex("points=\"([^\"]+)\"")));
  const std::string pts = m[1];
  CHECK(Count(pts, ",") <= 101);
  CHECK(pts.rfind("470.00,40.00") == pts.size() - 12);
}

}  // TEST_SUITE
