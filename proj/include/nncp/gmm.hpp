#pragma once

#include <vector>

#include "nncp/matrix.hpp"
#include "nncp/rng.hpp"

namespace nncp {

struct GmmOptions {
  int max_iterations = 200;
  double tolerance = 1e-6;
  double variance_floor = 1e-6;
  int restarts = 5;
};

/// Diagonal-covariance mixture. means and variances are K x D; weights sum
/// to 1 and every variance is at or above the floor.
struct GmmParams {
  std::vector<double> weights;
  Matrix means;
  Matrix variances;

  std::size_t components() const { return weights.size(); }
  std::size_t dims() const { return means.cols(); }
};

struct GmmFitResult {
  GmmParams params;
  // Log-likelihood after every EM iteration of the winning restart,
  // non-decreasing within 1e-9.
  std::vector<double> log_likelihood;
};

/// Total log-likelihood of the rows of data under the mixture.
double log_likelihood(const GmmParams& params, const Matrix& data);

/// E-step responsibilities, one row per data row, rows summing to 1.
/// Computed through log-sum-exp so tiny densities stay stable.
Matrix responsibilities(const GmmParams& params, const Matrix& data);

/// Expectation-maximization fit. Each restart initializes means from
/// `components` distinct random data rows, variances from the global
/// per-dimension variance, weights uniform; the best restart by final
/// log-likelihood wins. An iteration that lowers the log-likelihood (which
/// the variance floor can cause) is rolled back and the run stops there.
/// Throws InsufficientDataError when data has fewer rows than components.
GmmFitResult fit_gmm(const Matrix& data, int components, Rng& rng,
                     const GmmOptions& options = {});

}  // namespace nncp
