#include "creditrisk/ridge.hpp"

#include <cmath>
#include <limits>

#include "creditrisk/error.hpp"
#include "creditrisk/metrics.hpp"

namespace creditrisk {

double RidgeModel::Predict(std::span<const double> x) const {
  if (x.size() + 1 != static_cast<std::size_t>(coefficients.size())) {
    throw Error(ErrorKind::kDimensionMismatch, "ridge model input has wrong length");
  }
  double y = coefficients[0];
  for (std::size_t j = 0; j < x.size(); ++j) y += coefficients[j + 1] * x[j];
  return y;
}

RidgeModel FitRidge(const Matrix& features, const Vector& response, const Vector& weights,
                    double lambda) {
  const auto n = features.rows();
  const auto p = features.cols();
  if (response.size() != n || weights.size() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "ridge inputs have mismatched lengths");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::kInvalidArgument, "ridge lambda must be finite and >= 0");
  }
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "ridge weights must be finite and >= 0");
  }
  if ((weights.array() > 0.0).count() < p + 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "ridge needs at least " + std::to_string(p + 1) + " positive weights");
  }
  if (!response.allFinite() || !features.allFinite()) {
    throw Error(ErrorKind::kNumeric, "ridge inputs contain non-finite values");
  }

  // Centering on the weighted means leaves the intercept out of the penalty.
  const double total = weights.sum();
  const Eigen::RowVectorXd x_mean = (weights.transpose() * features) / total;
  // A constant response keeps its exact value so that SStot is exactly 0.
  const bool constant_response = response.maxCoeff() == response.minCoeff();
  const double y_mean = constant_response ? response[0] : weights.dot(response) / total;
  const Vector sqrt_w = weights.cwiseSqrt();

  // Least squares on [sqrt(W) Xc ; sqrt(lambda) I] avoids squaring the
  // condition number of the normal equations.
  Matrix a(n + p, p);
  a.topRows(n) = sqrt_w.asDiagonal() * (features.rowwise() - x_mean);
  a.bottomRows(p) = std::sqrt(lambda) * Matrix::Identity(p, p);
  Vector b = Vector::Zero(n + p);
  b.head(n) = sqrt_w.cwiseProduct(response.array().matrix() - Vector::Constant(n, y_mean));

  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < p) {
    throw Error(ErrorKind::kSingular, "penalised ridge system is singular");
  }
  const Vector slopes = qr.solve(b);

  RidgeModel model;
  model.lambda = lambda;
  model.coefficients.resize(p + 1);
  model.coefficients[0] = y_mean - x_mean.dot(slopes);
  model.coefficients.tail(p) = slopes;

  const Vector fitted = (features * slopes).array() + model.coefficients[0];
  const double ss_tot = weights.dot((response.array() - y_mean).square().matrix());
  if (ss_tot > 0.0) {
    model.r_squared = RSquared(fitted, response, weights);
  } else {
    const double ss_res = weights.dot((response - fitted).array().square().matrix());
    model.r_squared = ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  }
  return model;
}

double RidgeObjective(const Matrix& features, const Vector& response, const Vector& weights,
                      double lambda, const Vector& coefficients) {
  const auto p = features.cols();
  const Vector residual =
      response - ((features * coefficients.tail(p)).array() + coefficients[0]).matrix();
  return weights.dot(residual.array().square().matrix()) +
         lambda * coefficients.tail(p).squaredNorm();
}

}  // namespace creditrisk
