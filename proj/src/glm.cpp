#include "creditrisk/glm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "creditrisk/error.hpp"

namespace creditrisk {

using json = nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
// |beta| beyond this means the likelihood is still climbing towards a
// supremum at infinity.
constexpr double kSeparationGuard = 1e8;
// Fitted |eta| beyond this saturates the inverse link in double precision.
constexpr double kSaturatedEta = 30.0;

double Softplus(double eta) {
  return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

// phi(x) / Phi(x), the inverse Mills ratio.
double MillsRatio(double x) {
  const double log_pdf = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
  return std::exp(log_pdf - LogNormalCdf(x));
}

struct PointDerivatives {
  double log_likelihood;
  double first;   // d ll / d eta
  double second;  // d2 ll / d eta2 (<= 0)
};

PointDerivatives Derivatives(Link link, int y, double eta) {
  if (link == Link::kLogit) {
    const double p = Logistic(eta);
    return {y * eta - Softplus(eta), y - p, -p * (1.0 - p)};
  }
  // Probit: ll = y log Phi(eta) + (1 - y) log Phi(-eta).
  if (y == 1) {
    const double m = MillsRatio(eta);
    return {LogNormalCdf(eta), m, -m * (eta + m)};
  }
  const double m = MillsRatio(-eta);
  return {LogNormalCdf(-eta), -m, -m * (m - eta)};
}

json ToJsonArray(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::isfinite(v[i])) {
      out.push_back(v[i]);
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

Vector FromJsonArray(const json& a) {
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    v[i] = a[i].is_null() ? std::numeric_limits<double>::quiet_NaN() : a[i].get<double>();
  }
  return v;
}

GlmModel FitLeastSquares(const Matrix& x, const Dataset& data) {
  const auto n = x.rows();
  const auto k = x.cols();
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = data.target()[i];

  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  if (qr.rank() < k) {
    throw Error(ErrorKind::kSingular, "design matrix is rank deficient (rank " +
                                          std::to_string(qr.rank()) + " of " +
                                          std::to_string(k) + ")");
  }
  GlmModel model;
  model.link = Link::kIdentity;
  model.feature_names = data.feature_names();
  model.coefficients = qr.solve(y);
  const double rss = (y - x * model.coefficients).squaredNorm();
  model.final_log_likelihood = rss;
  model.converged = true;
  model.iterations = 1;

  const auto dof = n - k;
  model.standard_errors = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());
  if (dof > 0) {
    const Matrix xtx_inv = (x.transpose() * x).ldlt().solve(Matrix::Identity(k, k));
    model.standard_errors = (xtx_inv.diagonal() * (rss / static_cast<double>(dof))).cwiseSqrt();
  }
  return model;
}

bool HasSaturatedFit(const Matrix& x, const std::vector<int>& y, const Vector& beta) {
  const Vector eta = x * beta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if ((y[i] == 1 && eta[i] > kSaturatedEta) || (y[i] == 0 && eta[i] < -kSaturatedEta)) {
      return true;
    }
  }
  return false;
}

[[noreturn]] void ThrowSeparation(Link link, int iteration) {
  throw Error(ErrorKind::kSeparation,
              std::string("data are separable: ") + LinkName(link) +
                  " likelihood has no finite maximum (detected at iteration " +
                  std::to_string(iteration) + ")");
}

}  // namespace

double Logistic(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// std::erfc is accurate to a few ulp over the whole line, which keeps the
// absolute error of Phi far below 1e-12.
double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalPdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double LogNormalCdf(double x) {
  if (x > 0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
  if (x > -37.0) return std::log(NormalCdf(x));
  // Asymptotic expansion of the Gaussian tail.
  const double z2 = 1.0 / (x * x);
  const double series = 1.0 - z2 + 3.0 * z2 * z2 - 15.0 * z2 * z2 * z2;
  return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(series);
}

const char* LinkName(Link link) {
  switch (link) {
    case Link::kIdentity: return "identity";
    case Link::kLogit: return "logit";
    case Link::kProbit: return "probit";
  }
  return "unknown";
}

Link ParseLink(const std::string& name) {
  if (name == "identity" || name == "linear") return Link::kIdentity;
  if (name == "logit" || name == "logistic") return Link::kLogit;
  if (name == "probit") return Link::kProbit;
  throw Error(ErrorKind::kInvalidArgument, "unknown link '" + name + "'");
}

Matrix DesignMatrix(const Matrix& features) {
  Matrix x(features.rows(), features.cols() + 1);
  x.col(0).setOnes();
  x.rightCols(features.cols()) = features;
  return x;
}

double GlmModel::LinearPredictor(std::span<const double> x) const {
  if (x.size() != num_features()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "expected " + std::to_string(num_features()) + " features, got " +
                    std::to_string(x.size()));
  }
  double eta = coefficients[0];
  for (std::size_t j = 0; j < x.size(); ++j) eta += coefficients[j + 1] * x[j];
  return eta;
}

double GlmLogLikelihood(const Matrix& design, const std::vector<int>& target, Link link,
                        const Vector& coefficients, Vector* gradient) {
  if (link == Link::kIdentity) {
    throw Error(ErrorKind::kInvalidArgument, "identity link has no binomial likelihood");
  }
  const Vector eta = design * coefficients;
  Vector d(eta.size());
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const auto pd = Derivatives(link, target[i], eta[i]);
    ll += pd.log_likelihood;
    d[i] = pd.first;
  }
  if (gradient) *gradient = design.transpose() * d;
  return ll;
}

GlmModel FitGlm(const Dataset& data, Link link, const FitConfig& config) {
  if (config.max_iterations < 1 || !(config.tolerance > 0) || config.step_halvings < 0) {
    throw Error(ErrorKind::kInvalidArgument, "invalid FitConfig");
  }
  const auto n = data.num_rows();
  const auto k = data.num_features() + 1;
  if (n < k) {
    throw Error(ErrorKind::kInvalidArgument,
                "need at least " + std::to_string(k) + " rows to fit " +
                    std::to_string(k) + " coefficients, got " + std::to_string(n));
  }
  const Matrix x = DesignMatrix(data.features());
  if (link == Link::kIdentity) return FitLeastSquares(x, data);

  const auto& y = data.target();
  const auto bads = data.num_bads();
  if (bads == 0 || bads == n) {
    throw Error(ErrorKind::kSingleClass, "target has a single class");
  }
  if (Eigen::ColPivHouseholderQR<Matrix>(x).rank() < static_cast<Eigen::Index>(k)) {
    throw Error(ErrorKind::kSingular, "design matrix is rank deficient");
  }

  GlmModel model;
  model.link = link;
  model.feature_names = data.feature_names();
  Vector beta = Vector::Zero(k);
  Vector gradient;
  double ll = GlmLogLikelihood(x, y, link, beta, &gradient);
  model.log_likelihood_trace.push_back(ll);

  // A perfectly fitted sample drives the likelihood to 0 from below.
  const double perfect_fit = -1e-10 * static_cast<double>(n);

  Matrix info;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const Vector eta = x * beta;
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = -Derivatives(link, y[i], eta[i]).second;
    info = x.transpose() * w.asDiagonal() * x;
    Eigen::LDLT<Matrix> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-15) {
      if (HasSaturatedFit(x, y, beta)) ThrowSeparation(link, it);
      throw Error(ErrorKind::kSingular, "information matrix is singular");
    }
    const Vector step = ldlt.solve(gradient);

    bool accepted = false;
    double scale = 1.0;
    Vector candidate;
    Vector candidate_gradient;
    double candidate_ll = 0.0;
    for (int h = 0; h <= config.step_halvings; ++h, scale *= 0.5) {
      candidate = beta + scale * step;
      candidate_ll = GlmLogLikelihood(x, y, link, candidate, &candidate_gradient);
      if (std::isfinite(candidate_ll) && candidate_ll >= ll) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No ascent along the Newton direction: we sit at the maximum up to
      // rounding.
      model.converged = gradient.lpNorm<Eigen::Infinity>() <
                        std::sqrt(config.tolerance) * std::max(1.0, std::abs(ll));
      break;
    }

    const double change = (candidate - beta).lpNorm<Eigen::Infinity>();
    beta = candidate;
    gradient = candidate_gradient;
    ll = candidate_ll;
    model.iterations = it;
    model.log_likelihood_trace.push_back(ll);

    if (beta.lpNorm<Eigen::Infinity>() > kSeparationGuard || ll > perfect_fit) {
      ThrowSeparation(link, it);
    }
    if (change < config.tolerance) {
      model.converged = true;
      break;
    }
  }
  if (!model.converged && HasSaturatedFit(x, y, beta)) {
    ThrowSeparation(link, model.iterations);
  }

  model.coefficients = beta;
  model.final_log_likelihood = ll;
  {
    const Vector eta = x * beta;
    Vector w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = -Derivatives(link, y[i], eta[i]).second;
    info = x.transpose() * w.asDiagonal() * x;
    const Matrix cov = info.ldlt().solve(Matrix::Identity(k, k));
    model.standard_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
  return model;
}

double PredictPd(const GlmModel& model, std::span<const double> x) {
  const double eta = model.LinearPredictor(x);
  double pd = 0.0;
  switch (model.link) {
    case Link::kIdentity:
      return eta;
    case Link::kLogit:
      pd = Logistic(eta);
      break;
    case Link::kProbit:
      pd = NormalCdf(eta);
      break;
  }
  // Keep saturated predictions inside the open unit interval.
  constexpr double kLowest = std::numeric_limits<double>::denorm_min();
  const double highest = std::nextafter(1.0, 0.0);
  return std::clamp(pd, kLowest, highest);
}

std::vector<double> OddsRatios(const GlmModel& model) {
  if (model.link != Link::kLogit) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string("odds ratios need a logit model, got ") + LinkName(model.link));
  }
  std::vector<double> out(model.num_features());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::exp(model.coefficients[j + 1]);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string GlmToJson(const GlmModel& model) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "glm";
  doc["link"] = LinkName(model.link);
  doc["feature_names"] = model.feature_names;
  doc["coefficients"] = ToJsonArray(model.coefficients);
  doc["diagnostics"] = {
      {"converged", model.converged},
      {"iterations", model.iterations},
      {model.link == Link::kIdentity ? "residual_sum_of_squares" : "log_likelihood",
       model.final_log_likelihood},
      {"standard_errors", ToJsonArray(model.standard_errors)},
  };
  return doc.dump(2) + "\n";
}

GlmModel GlmFromJson(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("kind").get<std::string>() != "glm") {
      throw Error(ErrorKind::kMalformedDocument, "not a glm model document");
    }
    if (doc.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error(ErrorKind::kMalformedDocument, "unsupported glm schema_version");
    }
    GlmModel model;
    model.link = ParseLink(doc.at("link").get<std::string>());
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.coefficients = FromJsonArray(doc.at("coefficients"));
    if (static_cast<std::size_t>(model.coefficients.size()) != model.feature_names.size() + 1 ||
        !model.coefficients.allFinite()) {
      throw Error(ErrorKind::kMalformedDocument, "glm coefficients do not match features");
    }
    const auto& diag = doc.at("diagnostics");
    model.converged = diag.at("converged").get<bool>();
    model.iterations = diag.at("iterations").get<int>();
    model.final_log_likelihood =
        model.link == Link::kIdentity ? diag.at("residual_sum_of_squares").get<double>()
                                      : diag.at("log_likelihood").get<double>();
    model.standard_errors = FromJsonArray(diag.at("standard_errors"));
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kMalformedDocument, std::string("bad glm document: ") + e.what());
  }
}

void SaveGlm(const GlmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << GlmToJson(model);
}

GlmModel LoadGlm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingFile, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return GlmFromJson(buffer.str());
}

}  // namespace creditrisk
