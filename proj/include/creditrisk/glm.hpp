#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "creditrisk/dataset.hpp"

namespace creditrisk {

// Inverse links.
double Logistic(double eta);       // exp(eta) / (1 + exp(eta)), overflow safe
double NormalCdf(double x);        // standard Gaussian CDF
double NormalPdf(double x);
double LogNormalCdf(double x);     // log Phi(x), finite far into the left tail

enum class Link { kIdentity, kLogit, kProbit };

const char* LinkName(Link link);
Link ParseLink(const std::string& name);

struct FitConfig {
  int max_iterations = 100;
  // Convergence on the max absolute coefficient change.
  double tolerance = 1e-8;
  int step_halvings = 10;
};

// A fitted linear / logistic / probit PD model. Coefficients are intercept
// first, then one per feature.
struct GlmModel {
  Link link = Link::kLogit;
  std::vector<std::string> feature_names;
  Vector coefficients;
  // Square roots of the diagonal of the inverse observed information (logit,
  // probit) or of sigma^2 (X'X)^-1 (identity).
  Vector standard_errors;
  bool converged = false;
  int iterations = 0;
  // Log-likelihood for logit/probit; residual sum of squares for identity.
  double final_log_likelihood = 0.0;
  // Log-likelihood after every accepted Newton step, starting at beta = 0.
  std::vector<double> log_likelihood_trace;

  std::size_t num_features() const { return feature_names.size(); }
  double LinearPredictor(std::span<const double> x) const;
};

// Identity link: ordinary least squares. Logit/probit: Newton-Raphson on
// the log-likelihood with step halving. Throws kSingular for a rank
// deficient design and kSeparation when the likelihood has no finite
// maximiser.
GlmModel FitGlm(const Dataset& data, Link link, const FitConfig& config = {});

// Identity: the unclipped linear predictor. Logit/probit: a probability.
double PredictPd(const GlmModel& model, std::span<const double> x);

// exp(beta_j) for every non-intercept coefficient: the factor by which the
// odds P(Y=1|x)/P(Y=0|x) are multiplied when feature j grows by one unit,
// all other features held fixed. Logit models only.
std::vector<double> OddsRatios(const GlmModel& model);

// Log-likelihood of `coefficients` under `link` and its gradient. Exposed so
// tests can check the derivatives used by the Newton iteration.
double GlmLogLikelihood(const Matrix& design, const std::vector<int>& target,
                        Link link, const Vector& coefficients, Vector* gradient = nullptr);

// [1 | X].
Matrix DesignMatrix(const Matrix& features);

void SaveGlm(const GlmModel& model, const std::filesystem::path& path);
GlmModel LoadGlm(const std::filesystem::path& path);
std::string GlmToJson(const GlmModel& model);
GlmModel GlmFromJson(const std::string& text);

}  // namespace creditrisk
