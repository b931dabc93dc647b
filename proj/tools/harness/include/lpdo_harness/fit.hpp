#pragma once

// Least-squares fit of f(x) = alpha + beta exp(-gamma x).

#include <vector>

#include "lpdo/error.hpp"

namespace lpdo::harness {

/// Data that cannot identify the model (too few points, constant y).
class FitError : public Error {
 public:
  using Error::Error;
};

struct FitResult {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double sigma_alpha = 0.0;
  double sigma_beta = 0.0;
  double sigma_gamma = 0.0;
  /// ||f(x) - y||_2 at the returned parameters.
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Damped Gauss-Newton (Levenberg-Marquardt). Starts from alpha = last y
/// and a log-linear estimate of gamma; standard errors come from the
/// covariance diagonal s^2 (J^T J)^{-1} with s^2 = RSS / (n - 3).
FitResult fit_exponential(const std::vector<double>& x, const std::vector<double>& y,
                          int max_iter = 500);

}  // namespace lpdo::harness
