#pragma once

#include <span>

#include "creditrisk/dataset.hpp"

namespace creditrisk {

// Weighted ridge regression with an unpenalised intercept.
struct RidgeModel {
  // Intercept first.
  Vector coefficients;
  double lambda = 0.0;
  // Weighted 1 - SSres/SStot on the fitting sample. A constant response that
  // is reproduced exactly reports 1.
  double r_squared = 0.0;

  double Predict(std::span<const double> x) const;
};

// Minimises  sum_i w_i (y_i - b0 - x_i' b)^2 + lambda ||b||^2  in closed form.
// Throws kSingular when the penalised system is rank deficient (lambda = 0
// with collinear inputs).
RidgeModel FitRidge(const Matrix& features, const Vector& response, const Vector& weights,
                    double lambda);

// The minimised objective, for optimality checks.
double RidgeObjective(const Matrix& features, const Vector& response, const Vector& weights,
                      double lambda, const Vector& coefficients);

}  // namespace creditrisk
