#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "creditrisk/error.hpp"
#include "creditrisk/glm.hpp"
#include "test_util.hpp"

using namespace creditrisk;

namespace {

// Phi(x) = 1/2 + phi(x) * sum_k x^(2k+1) / (1*3*...*(2k+1)). All terms share
// the sign of x, so the sum is free of cancellation; long double keeps it
// accurate to ~1e-17 for |x| <= 8.
double SeriesNormalCdf(double x) {
  const long double xl = x;
  long double term = xl, sum = xl;
  for (int k = 1; k < 500; ++k) {
    term *= xl * xl / (2 * k + 1);
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  const long double pdf = std::exp(-xl * xl / 2) / std::sqrt(2 * std::numbers::pi_v<long double>);
  return static_cast<double>(0.5L + pdf * sum);
}

GlmModel HandModel(Link link, std::vector<double> coef) {
  GlmModel m;
  m.link = link;
  m.coefficients = Eigen::Map<Vector>(coef.data(), static_cast<Eigen::Index>(coef.size()));
  for (std::size_t j = 1; j < coef.size(); ++j) m.feature_names.push_back("x" + std::to_string(j));
  return m;
}

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kInvalidArgument;
}

}  // namespace

TEST_SUITE("linear_models") {

TEST_CASE("inverse links at closed-form points") {
  const double none[] = {0.0};
  CHECK(PredictPd(HandModel(Link::kLogit, {0.0, 0.0}), none) == 0.5);
  CHECK(PredictPd(HandModel(Link::kProbit, {0.0, 0.0}), none) == 0.5);
  CHECK(PredictPd(HandModel(Link::kLogit, {std::log(3.0), 0.0}), none) ==
        doctest::Approx(0.75).epsilon(1e-15));
  CHECK(PredictPd(HandModel(Link::kIdentity, {1.3, 0.0}), none) == 1.3);
  CHECK(PredictPd(HandModel(Link::kProbit, {1.959964, 0.0}), none) ==
        doctest::Approx(0.975).epsilon(1e-6));
}

TEST_CASE("normal cdf agrees with an independent series") {
  CHECK(std::abs(SeriesNormalCdf(1.959964) - 0.975) < 1e-6);
  for (double x = -8.0; x <= 8.0; x += 0.0625) {
    CHECK(std::abs(NormalCdf(x) - SeriesNormalCdf(x)) < 1e-12);
  }
}

TEST_CASE("log normal cdf stays finite and accurate in the far tail") {
  for (double x : {-5.0, -20.0, -36.0, -40.0, -100.0, -1000.0}) {
    // Mills-ratio asymptotic: log Phi(x) ~ -x^2/2 - log(-x) - log(2 pi)/2 + log(1 - 1/x^2 + 3/x^4)
    const double approx = -x * x / 2 - std::log(-x) - 0.5 * std::log(2 * std::numbers::pi) +
                          std::log1p(-1 / (x * x) + 3 / (x * x * x * x) - 15 / std::pow(x, 6));
    const double got = LogNormalCdf(x);
    CHECK(std::isfinite(got));
    if (x <= -20.0) CHECK(got == doctest::Approx(approx).epsilon(1e-10));
  }
  CHECK(LogNormalCdf(0.0) == doctest::Approx(std::log(0.5)));
}

TEST_CASE("logistic is overflow safe and monotone") {
  CHECK(Logistic(1000.0) == 1.0);
  CHECK(Logistic(-1000.0) >= 0.0);
  CHECK(std::isfinite(Logistic(-1000.0)));
  double prev_logit = 0.0, prev_probit = 0.0;
  const GlmModel logit = HandModel(Link::kLogit, {0.0, 1.0});
  const GlmModel probit = HandModel(Link::kProbit, {0.0, 1.0});
  for (double eta = -8.0; eta <= 8.0; eta += 0.25) {
    const double x[] = {eta};
    const double a = PredictPd(logit, x), b = PredictPd(probit, x);
    CHECK(a > 0.0);
    CHECK(a < 1.0);
    CHECK(b > 0.0);
    CHECK(b < 1.0);
    if (eta > -8.0) {
      CHECK(a > prev_logit);
      CHECK(b > prev_probit);
    }
    prev_logit = a;
    prev_probit = b;
  }
  const double huge[] = {1e6};
  CHECK(PredictPd(logit, huge) < 1.0);
  const double wrong[] = {1.0, 2.0};
  CHECK_THROWS_AS(PredictPd(logit, wrong), Error);
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  const double h = 1e-5;
  for (int instance = 0; instance < 50; ++instance) {
    const Dataset d = testutil::RandomDataset(40, 3, 1000 + instance);
    const Matrix x = DesignMatrix(d.features());
    for (Link link : {Link::kLogit, Link::kProbit}) {
      Vector beta(4);
      for (int j = 0; j < 4; ++j) beta[j] = normal(rng);
      Vector grad;
      GlmLogLikelihood(x, d.target(), link, beta, &grad);
      for (int j = 0; j < 4; ++j) {
        Vector up = beta, down = beta;
        up[j] += h;
        down[j] -= h;
        const double fd = (GlmLogLikelihood(x, d.target(), link, up) -
                           GlmLogLikelihood(x, d.target(), link, down)) /
                          (2 * h);
        CHECK(std::abs(fd - grad[j]) <= 1e-4 * std::max(1.0, std::abs(grad[j])));
      }
    }
  }
}

TEST_CASE("newton ascent never decreases the likelihood and ends at a stationary point") {
  const Dataset d = testutil::RandomDataset(300, 4, 5);
  for (Link link : {Link::kLogit, Link::kProbit}) {
    const GlmModel m = FitGlm(d, link);
    CHECK(m.converged);
    for (std::size_t i = 1; i < m.log_likelihood_trace.size(); ++i) {
      CHECK(m.log_likelihood_trace[i] >= m.log_likelihood_trace[i - 1]);
    }
    Vector grad;
    const double ll = GlmLogLikelihood(DesignMatrix(d.features()), d.target(), link,
                                       m.coefficients, &grad);
    CHECK(ll == m.final_log_likelihood);
    CHECK(grad.lpNorm<Eigen::Infinity>() < 1e-6);
    for (int j = 0; j < m.standard_errors.size(); ++j) CHECK(m.standard_errors[j] > 0.0);
  }
}

TEST_CASE("identity link matches the normal equations") {
  const Dataset d = testutil::RandomDataset(60, 3, 8);
  const GlmModel m = FitGlm(d, Link::kIdentity);
  const Matrix x = DesignMatrix(d.features());
  Vector y(d.num_rows());
  for (std::size_t i = 0; i < d.num_rows(); ++i) y[i] = d.target()[i];
  const Vector oracle = (x.transpose() * x).ldlt().solve(x.transpose() * y);
  for (int j = 0; j < 4; ++j) CHECK(m.coefficients[j] == doctest::Approx(oracle[j]).epsilon(1e-10));
  CHECK(m.final_log_likelihood == doctest::Approx((y - x * oracle).squaredNorm()));
}

TEST_CASE("separation is reported, not silently diverged") {
  Matrix x(2, 1);
  x << 0, 1;
  const Dataset two(x, {0, 1}, {"x"}, {"a", "b"});
  CHECK(KindOf([&] { FitGlm(two, Link::kLogit); }) == ErrorKind::kSeparation);
  CHECK(KindOf([&] { FitGlm(two, Link::kProbit); }) == ErrorKind::kSeparation);

  Matrix big(40, 2);
  std::vector<int> y(40);
  std::vector<std::string> ids(40);
  for (int i = 0; i < 40; ++i) {
    big(i, 0) = i;
    big(i, 1) = std::sin(i);
    y[i] = i >= 20;
    ids[i] = std::to_string(i);
  }
  const Dataset separable(big, y, {"a", "b"}, ids);
  CHECK(KindOf([&] { FitGlm(separable, Link::kLogit); }) == ErrorKind::kSeparation);
}

TEST_CASE("fit error paths") {
  Matrix x(4, 2);
  x << 1, 2, 2, 4, 3, 6, 4, 8;
  const Dataset collinear(x, {0, 1, 0, 1}, {"a", "b"}, {"0", "1", "2", "3"});
  CHECK(KindOf([&] { FitGlm(collinear, Link::kLogit); }) == ErrorKind::kSingular);
  CHECK(KindOf([&] { FitGlm(collinear, Link::kIdentity); }) == ErrorKind::kSingular);
  Matrix z(3, 1);
  z << 1, 2, 3;
  const Dataset single(z, {0, 0, 0}, {"a"}, {"0", "1", "2"});
  CHECK(KindOf([&] { FitGlm(single, Link::kLogit); }) == ErrorKind::kSingleClass);
  const Dataset too_small(Matrix::Ones(1, 1), {1}, {"a"}, {"0"});
  CHECK(KindOf([&] { FitGlm(too_small, Link::kLogit); }) == ErrorKind::kInvalidArgument);
  FitConfig bad;
  bad.tolerance = 0.0;
  CHECK(KindOf([&] { FitGlm(single, Link::kLogit, bad); }) == ErrorKind::kInvalidArgument);
  CHECK_THROWS_AS(ParseLink("cauchit"), Error);
}

TEST_CASE("odds ratios") {
  const GlmModel m = HandModel(Link::kLogit, {0.3, 0.0, std::log(2.0), -1.2});
  const auto odds = OddsRatios(m);
  CHECK(odds[0] == 1.0);
  CHECK(odds[1] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(OddsRatios(HandModel(Link::kProbit, {0.0, 1.0})), Error);

  const Dataset d = testutil::RandomDataset(400, 3, 12);
  const GlmModel fitted = FitGlm(d, Link::kLogit);
  const auto ratios = OddsRatios(fitted);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  auto odds_at = [&](const std::vector<double>& x) {
    const double p = PredictPd(fitted, x);
    return p / (1 - p);
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x = {normal(rng), normal(rng), normal(rng)};
    for (std::size_t j = 0; j < 3; ++j) {
      auto shifted = x;
      shifted[j] += 1.0;
      CHECK(odds_at(shifted) / odds_at(x) == doctest::Approx(ratios[j]).epsilon(1e-9));
    }
  }
}

TEST_CASE("model serialization round trips bit exactly") {
  const Dataset d = testutil::RandomDataset(200, 3, 31);
  testutil::TempDir dir("glm");
  for (Link link : {Link::kIdentity, Link::kLogit, Link::kProbit}) {
    const GlmModel m = FitGlm(d, link);
    SaveGlm(m, dir / "m.model");
    const GlmModel back = LoadGlm(dir / "m.model");
    CHECK(back.link == m.link);
    CHECK(back.coefficients == m.coefficients);
    CHECK(back.feature_names == m.feature_names);
    CHECK(back.converged == m.converged);
    for (std::size_t i = 0; i < 20; ++i) {
      const auto x = d.Row(i);
      CHECK(PredictPd(back, x) == PredictPd(m, x));
    }
    CHECK(GlmToJson(back) == GlmToJson(m));
  }
  CHECK_THROWS_AS(GlmFromJson("{\"kind\":\"gbm\"}"), Error);
  CHECK_THROWS_AS(GlmFromJson("not json"), Error);
}

}  // TEST_SUITE
