#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "creditrisk/dataset.hpp"
#include "creditrisk/error.hpp"
#include "creditrisk/glm.hpp"
#include "test_util.hpp"

using namespace creditrisk;
using testutil::TempDir;
using testutil::WriteFile;

namespace {

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kInvalidArgument;
}

std::string MessageOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("three-row csv reads back") {
  TempDir dir("csv");
  WriteFile(dir / "a.csv", "row_id,x1,x2,default\nu1,1.5,2,0\nu2,-3,4e-1,1\nu3,0,7,0\n");
  const Dataset d = LoadCsv(dir / "a.csv");
  CHECK(d.num_rows() == 3);
  CHECK(d.num_features() == 2);
  CHECK(d.bad_rate() == doctest::Approx(1.0 / 3.0));
  CHECK(d.feature_names() == std::vector<std::string>{"x1", "x2"});
  CHECK(d.row_ids() == std::vector<std::string>{"u1", "u2", "u3"});
  CHECK(d.features()(1, 1) == 0.4);
}

TEST_CASE("csv without id column numbers rows and keeps header order") {
  TempDir dir("csv");
  WriteFile(dir / "a.csv", "b,default,a\n1,0,2\n3,1,4\n");
  const Dataset d = LoadCsv(dir / "a.csv");
  CHECK(d.feature_names() == std::vector<std::string>{"b", "a"});
  CHECK(d.row_ids() == std::vector<std::string>{"0", "1"});
  CHECK(d.features()(1, 1) == 4.0);
}

TEST_CASE("csv rejection paths name the error kind and location") {
  TempDir dir("csv");
  WriteFile(dir / "empty_cell.csv", "x,default\n1,0\n,1\n");
  WriteFile(dir / "text.csv", "x,default\n1,0\nabc,1\n");
  WriteFile(dir / "nan.csv", "x,default\nnan,0\n");
  WriteFile(dir / "two.csv", "x,default\n1,0\n2,2\n");
  WriteFile(dir / "no_target.csv", "x,y\n1,0\n");
  WriteFile(dir / "ragged.csv", "x,default\n1,0,3\n");

  CHECK(KindOf([&] { LoadCsv(dir / "missing.csv"); }) == ErrorKind::kMissingFile);
  CHECK(KindOf([&] { LoadCsv(dir / "empty_cell.csv"); }) == ErrorKind::kMissingValue);
  CHECK(MessageOf([&] { LoadCsv(dir / "empty_cell.csv"); }) ==
        "missing value at (row 1, column x)");
  CHECK(KindOf([&] { LoadCsv(dir / "text.csv"); }) == ErrorKind::kNonNumeric);
  CHECK(MessageOf([&] { LoadCsv(dir / "text.csv"); }).find("(row 1, column x)") !=
        std::string::npos);
  CHECK(KindOf([&] { LoadCsv(dir / "nan.csv"); }) == ErrorKind::kMissingValue);
  CHECK(KindOf([&] { LoadCsv(dir / "two.csv"); }) == ErrorKind::kNonBinaryTarget);
  CHECK(MessageOf([&] { LoadCsv(dir / "two.csv"); }).find("non-binary target") !=
        std::string::npos);
  CHECK(KindOf([&] { LoadCsv(dir / "no_target.csv"); }) == ErrorKind::kInvalidArgument);
  CHECK(KindOf([&] { LoadCsv(dir / "ragged.csv"); }) == ErrorKind::kMalformedDocument);
}

TEST_CASE("dataset constructor validates its invariants") {
  Matrix x(2, 1);
  x << 1, 2;
  CHECK_THROWS_AS(Dataset(x, {0, 2}, {"a"}, {"0", "1"}), Error);
  CHECK_THROWS_AS(Dataset(x, {0, 1}, {"a", "b"}, {"0", "1"}), Error);
  CHECK_THROWS_AS(Dataset(x, {0, 1}, {"a"}, {"0"}), Error);
  x(1, 0) = std::nan("");
  CHECK(KindOf([&] { Dataset(x, {0, 1}, {"a"}, {"0", "1"}); }) == ErrorKind::kMissingValue);
}

TEST_CASE("csv round trip is bit exact") {
  TempDir dir("csv");
  const Dataset d = testutil::RandomDataset(50, 4, 3);
  WriteCsv(d, dir / "d.csv");
  const Dataset back = LoadCsv(dir / "d.csv");
  CHECK(back.features() == d.features());
  CHECK(back.target() == d.target());
  CHECK(back.row_ids() == d.row_ids());
  CHECK(back.feature_names() == d.feature_names());
}

TEST_CASE("split sizes on the 56,311-row population") {
  SyntheticSpec spec;
  spec.seed = 11;
  const Dataset d = GenerateSynthetic(spec).data;
  CHECK(d.num_rows() == 56311);
  SplitSpec split_spec;
  split_spec.seed = 5;
  const SplitResult s = Split(d, split_spec);
  CHECK(s.train.num_rows() == 39418);
  CHECK(s.test.num_rows() == 16893);
  CHECK(std::abs(s.train.bad_rate() - s.test.bad_rate()) <= 0.005);

  // Partition: every id exactly once.
  std::multiset<std::string> ids(s.train.row_ids().begin(), s.train.row_ids().end());
  ids.insert(s.test.row_ids().begin(), s.test.row_ids().end());
  CHECK(ids.size() == d.num_rows());
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == d.num_rows());

  const SplitResult again = Split(d, split_spec);
  CHECK(again.train.row_ids() == s.train.row_ids());
  CHECK(again.test.row_ids() == s.test.row_ids());
  split_spec.seed = 6;
  CHECK(Split(d, split_spec).train.row_ids() != s.train.row_ids());
}

TEST_CASE("table-sized bad rates 2.9% / 3.1% fall within the default tolerance") {
  CHECK(std::abs(0.029 - 0.031) <= SplitSpec{}.balance_check_tolerance + 1e-15);
}

TEST_CASE("split error paths") {
  Matrix x(4, 1);
  x << 1, 2, 3, 4;
  const Dataset one_class(x, {0, 0, 0, 0}, {"a"}, {"0", "1", "2", "3"});
  CHECK(KindOf([&] { Split(one_class, {}); }) == ErrorKind::kSingleClass);
  const Dataset tiny(x, {1, 0, 0, 0}, {"a"}, {"0", "1", "2", "3"});
  CHECK(KindOf([&] { Split(tiny, {}); }) == ErrorKind::kUnbalancedSplit);
  SplitSpec bad;
  bad.train_fraction = 1.0;
  CHECK(KindOf([&] { Split(tiny, bad); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("generator hits the requested bad rate") {
  SyntheticSpec spec;
  spec.seed = 7;
  const SyntheticData s = GenerateSynthetic(spec);
  CHECK(s.data.num_rows() == 56311);
  CHECK(s.data.num_features() == 20);
  CHECK(s.data.bad_rate() >= 0.025);
  CHECK(s.data.bad_rate() <= 0.035);
  // The nonlinear ground truth carries an interaction and a step term.
  CHECK(s.truth.interaction != 0.0);
  CHECK(s.truth.step != 0.0);
}

TEST_CASE("generator is deterministic in its settings") {
  SyntheticSpec spec;
  spec.n_rows = 2000;
  spec.n_features = 5;
  spec.seed = 3;
  const Dataset a = GenerateSynthetic(spec).data;
  const Dataset b = GenerateSynthetic(spec).data;
  CHECK(a.features() == b.features());
  CHECK(a.target() == b.target());
  spec.seed = 4;
  CHECK(GenerateSynthetic(spec).data.features() != a.features());
}

TEST_CASE("uncorrelated features have near-zero sample correlation") {
  SyntheticSpec spec;
  spec.n_rows = 10000;
  spec.n_features = 6;
  spec.seed = 21;
  const Matrix& x = GenerateSynthetic(spec).data.features();
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix cov = centered.transpose() * centered;
  for (int a = 0; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) {
      const double r = cov(a, b) / std::sqrt(cov(a, a) * cov(b, b));
      CHECK(std::abs(r) < 0.05);
    }
  }
}

TEST_CASE("correlated features reach the requested correlation") {
  SyntheticSpec spec;
  spec.n_rows = 10000;
  spec.n_features = 4;
  spec.correlation = 0.9;
  spec.seed = 2;
  const Matrix& x = GenerateSynthetic(spec).data.features();
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix cov = centered.transpose() * centered;
  const double r = cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1));
  CHECK(r == doctest::Approx(0.9).epsilon(0.02));
}

TEST_CASE("generator validation and calibration failure") {
  SyntheticSpec spec;
  spec.n_rows = 0;
  CHECK(KindOf([&] { GenerateSynthetic(spec); }) == ErrorKind::kInvalidArgument);
  spec = {};
  spec.correlation = 1.0;
  CHECK(KindOf([&] { GenerateSynthetic(spec); }) == ErrorKind::kInvalidArgument);
  spec = {};
  spec.bad_rate_target = 0.0;
  CHECK(KindOf([&] { GenerateSynthetic(spec); }) == ErrorKind::kInvalidArgument);
  // Ten rows cannot realise a rate within half a point of 3%.
  spec = {};
  spec.n_rows = 10;
  spec.n_features = 2;
  CHECK(KindOf([&] { GenerateSynthetic(spec); }) == ErrorKind::kCalibration);
}

TEST_CASE("linear generator is recovered by a logistic fit, better with more rows") {
  auto max_error = [](std::size_t n) {
    SyntheticSpec spec;
    spec.n_rows = n;
    spec.n_features = 5;
    spec.bad_rate_target = 0.2;
    spec.nonlinearity = Nonlinearity::kLinear;
    spec.seed = 99;
    const SyntheticData s = GenerateSynthetic(spec);
    const GlmModel m = FitGlm(s.data, Link::kLogit);
    double worst = 0.0, worst_z = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      const double err = std::abs(m.coefficients[j + 1] - s.truth.slopes[j]);
      worst = std::max(worst, err);
      worst_z = std::max(worst_z, err / m.standard_errors[j + 1]);
    }
    worst_z = std::max(worst_z,
                       std::abs(m.coefficients[0] - s.truth.intercept) / m.standard_errors[0]);
    return std::make_pair(worst, worst_z);
  };
  const auto [small_err, small_z] = max_error(5000);
  const auto [large_err, large_z] = max_error(50000);
  CHECK(large_z < 3.0);
  CHECK(small_z < 3.0);
  CHECK(large_err < small_err);
}

TEST_CASE("summary statistics") {
  Matrix x(4, 2);
  x << 1, 5, 2, 5, 3, 5, 4, 5;
  const Dataset d(x, {0, 1, 0, 0}, {"a", "c"}, {"0", "1", "2", "3"});
  const DatasetSummary s = Summarize(d);
  CHECK(s.n_rows == 4);
  CHECK(s.n_features == 2);
  CHECK(s.bad_rate == 0.25);
  CHECK(s.features[0].mean == 2.5);
  CHECK(s.features[0].std == doctest::Approx(std::sqrt(1.25)));
  CHECK(s.features[0].min == 1.0);
  CHECK(s.features[0].max == 4.0);
  CHECK(s.features[1].std == 0.0);

  const Dataset no_features(Matrix(3, 0), {0, 1, 1}, {}, {"a", "b", "c"});
  const DatasetSummary empty = Summarize(no_features);
  CHECK(empty.n_features == 0);
  CHECK(empty.features.empty());
  CHECK(empty.bad_rate == doctest::Approx(2.0 / 3.0));
}

}  // TEST_SUITE
