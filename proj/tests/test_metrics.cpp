#include <doctest.h>

#include <cmath>
#include <random>

#include "creditrisk/error.hpp"
#include "creditrisk/metrics.hpp"

using namespace creditrisk;

namespace {

// (concordant + ties/2) / (n_good * n_bad), by looking at every pair.
double PairwiseAuc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

struct Instance {
  std::vector<double> scores;
  std::vector<int> target;
};

// Scores drawn from a small grid so ties are frequent.
Instance RandomInstance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 200);
  std::uniform_int_distribution<int> level(0, 15);
  std::bernoulli_distribution coin(0.3);
  Instance in;
  const int n = size(rng);
  for (int i = 0; i < n; ++i) {
    in.scores.push_back(level(rng) / 8.0 + (coin(rng) ? 0.0 : 0.01 * level(rng)));
    in.target.push_back(coin(rng) ? 1 : 0);
  }
  in.target[0] = 1;
  in.target[1] = 0;
  return in;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("auc equals the pairwise concordance oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = RandomInstance(rng);
    const EvalReport r = Evaluate(in.scores, in.target);
    CHECK(std::abs(r.auc - PairwiseAuc(in.scores, in.target)) <= 1e-12);
    CHECK(r.gini == 2.0 * r.auc - 1.0);
  }
}

TEST_CASE("perfect ranking and all ties") {
  const EvalReport perfect = Evaluate({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0});
  CHECK(perfect.gini == 1.0);
  CHECK(perfect.n_bad == 2);
  CHECK(perfect.n_good == 2);
  const EvalReport ties = Evaluate({0.3, 0.3, 0.3, 0.3, 0.3}, {1, 0, 0, 1, 0});
  CHECK(ties.auc == 0.5);
  CHECK(ties.gini == 0.0);
  REQUIRE(ties.lorenz_points.size() == 2);
  CHECK(ties.lorenz_points[1].population_share == 1.0);
  CHECK(ties.lorenz_points[1].bad_share == 1.0);
}

TEST_CASE("lorenz curve endpoints and monotonicity") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance in = RandomInstance(rng);
    const auto& pts = Evaluate(in.scores, in.target).lorenz_points;
    CHECK(pts.front().population_share == 0.0);
    CHECK(pts.front().bad_share == 0.0);
    CHECK(pts.back().population_share == 1.0);
    CHECK(pts.back().bad_share == 1.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      CHECK(pts[i].population_share > pts[i - 1].population_share);
      CHECK(pts[i].bad_share >= pts[i - 1].bad_share);
    }
  }
}

TEST_CASE("rank invariance and antisymmetry") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance in = RandomInstance(rng);
    std::vector<double> transformed, negated;
    for (double s : in.scores) {
      transformed.push_back(std::exp(3.0 * s) + 5.0);
      negated.push_back(-s);
    }
    const EvalReport a = Evaluate(in.scores, in.target);
    const EvalReport b = Evaluate(transformed, in.target);
    CHECK(a.gini == b.gini);
    CHECK(a.auc == b.auc);
    CHECK(Evaluate(negated, in.target).gini == doctest::Approx(-a.gini).epsilon(1e-12));
  }
}

TEST_CASE("gini delta in points") {
  EvalReport a, b;
  a.gini = 0.65;
  b.gini = 0.61;
  CHECK(GiniDelta(a, b) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(GiniDelta(a, a) == 0.0);
}

TEST_CASE("weighted r squared") {
  Vector o(4), p(4), w = Vector::Ones(4);
  o << 1, 2, 3, 4;
  p << 1, 2, 3, 5;
  CHECK(RSquared(p, o, w) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(RSquared(o, o, w) == 1.0);
  Vector w2(4);
  w2 << 1, 2, 3, 4;
  const double mean = w2.dot(o) / w2.sum();
  CHECK(std::abs(RSquared(Vector::Constant(4, mean), o, w2)) < 1e-15);
  CHECK_THROWS_AS(RSquared(p, Vector::Constant(4, 2.0), w), Error);
}

TEST_CASE("evaluate error paths") {
  auto kind = [](const std::vector<double>& s, const std::vector<int>& y) {
    try {
      Evaluate(s, y);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kInvalidArgument;
  };
  CHECK(kind({0.1, 0.2}, {0, 0}) == ErrorKind::kSingleClass);
  CHECK(kind({0.1}, {0, 1}) == ErrorKind::kDimensionMismatch);
  CHECK(kind({0.1, std::nan("")}, {0, 1}) == ErrorKind::kNumeric);
}

TEST_CASE("report json round trip") {
  std::mt19937_64 rng(1);
  const Instance in = RandomInstance(rng);
  const EvalReport r = Evaluate(in.scores, in.target);
  const EvalReport back = EvalReportFromJson(EvalReportToJson(r, "m"));
  CHECK(back.gini == r.gini);
  CHECK(back.auc == r.auc);
  CHECK(back.n_good == r.n_good);
  REQUIRE(back.lorenz_points.size() == r.lorenz_points.size());
  for (std::size_t i = 0; i < r.lorenz_points.size(); ++i) {
    CHECK(back.lorenz_points[i].bad_share == r.lorenz_points[i].bad_share);
  }
  CHECK_THROWS_AS(EvalReportFromJson("{}"), Error);
}

}  // TEST_SUITE
