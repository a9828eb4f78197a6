#include "nncp/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nncp/errors.hpp"

namespace nncp {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

// Row n of data under component c, in log space.
double log_density(const GmmParams& params, const Matrix& data,
                   std::size_t n, std::size_t c) {
  double acc = 0.0;
  for (std::size_t d = 0; d < params.dims(); ++d) {
    const double var = params.variances(c, d);
    const double diff = data(n, d) - params.means(c, d);
    acc += kLogTwoPi + std::log(var) + diff * diff / var;
  }
  return -0.5 * acc;
}

// Fills row n of resp (when resp != nullptr) and returns the log marginal
// density of that row.
double row_posterior(const GmmParams& params, const Matrix& data,
                     std::size_t n, Matrix* resp) {
  const std::size_t k = params.components();
  std::vector<double> logs(k);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    logs[c] = std::log(params.weights[c]) + log_density(params, data, n, c);
    peak = std::max(peak, logs[c]);
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) sum += std::exp(logs[c] - peak);
  const double log_marginal = peak + std::log(sum);
  if (resp) {
    for (std::size_t c = 0; c < k; ++c) {
      (*resp)(n, c) = std::exp(logs[c] - log_marginal);
    }
  }
  return log_marginal;
}

GmmParams initial_params(const Matrix& data, int components, Rng& rng,
                         double floor) {
  const std::size_t n = data.rows();
  const std::size_t dims = data.cols();
  const auto k = static_cast<std::size_t>(components);

  std::vector<std::size_t> picks;
  while (picks.size() < k) {
    std::size_t candidate = rng.below(n);
    if (std::find(picks.begin(), picks.end(), candidate) == picks.end()) {
      picks.push_back(candidate);
    }
  }

  std::vector<double> mean(dims, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t d = 0; d < dims; ++d) mean[d] += data(r, d);
  }
  for (double& v : mean) v /= static_cast<double>(n);
  std::vector<double> var(dims, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t d = 0; d < dims; ++d) {
      const double diff = data(r, d) - mean[d];
      var[d] += diff * diff;
    }
  }
  for (double& v : var) v = std::max(v / static_cast<double>(n), floor);

  GmmParams params;
  params.weights.assign(k, 1.0 / static_cast<double>(k));
  params.means = Matrix(k, dims);
  params.variances = Matrix(k, dims);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < dims; ++d) {
      params.means(c, d) = data(picks[c], d);
      params.variances(c, d) = var[d];
    }
  }
  return params;
}

GmmFitResult run_em(const Matrix& data, GmmParams params,
                    const GmmOptions& options) {
  const std::size_t n = data.rows();
  const std::size_t k = params.components();
  const std::size_t dims = params.dims();

  GmmFitResult result;
  Matrix resp(n, k);
  double previous = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double ll = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      ll += row_posterior(params, data, r, &resp);
    }

    if (ll < previous - 1e-9) {
      // The variance floor can push the likelihood down; keep the last
      // good parameters instead of reporting a decreasing trajectory.
      break;
    }
    result.params = params;
    result.log_likelihood.push_back(ll);
    if (ll - previous < options.tolerance && iter > 0) break;
    previous = ll;

    for (std::size_t c = 0; c < k; ++c) {
      double weight_sum = 0.0;
      for (std::size_t r = 0; r < n; ++r) weight_sum += resp(r, c);
      if (weight_sum < 1e-12) {
        params.weights[c] = weight_sum / static_cast<double>(n);
        continue;
      }
      params.weights[c] = weight_sum / static_cast<double>(n);
      for (std::size_t d = 0; d < dims; ++d) {
        double m = 0.0;
        for (std::size_t r = 0; r < n; ++r) m += resp(r, c) * data(r, d);
        m /= weight_sum;
        double v = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double diff = data(r, d) - m;
          v += resp(r, c) * diff * diff;
        }
        params.means(c, d) = m;
        params.variances(c, d) =
            std::max(v / weight_sum, options.variance_floor);
      }
    }
  }
  return result;
}

}  // namespace

double log_likelihood(const GmmParams& params, const Matrix& data) {
  if (data.cols() != params.dims()) {
    throw ShapeError("gmm log_likelihood: data has " +
                     std::to_string(data.cols()) + " dims, mixture " +
                     std::to_string(params.dims()));
  }
  double total = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    total += row_posterior(params, data, r, nullptr);
  }
  return total;
}

Matrix responsibilities(const GmmParams& params, const Matrix& data) {
  if (data.cols() != params.dims()) {
    throw ShapeError("gmm responsibilities: data has " +
                     std::to_string(data.cols()) + " dims, mixture " +
                     std::to_string(params.dims()));
  }
  Matrix resp(data.rows(), params.components());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    row_posterior(params, data, r, &resp);
  }
  return resp;
}

GmmFitResult fit_gmm(const Matrix& data, int components, Rng& rng,
                     const GmmOptions& options) {
  if (components < 1) throw ArgumentError("fit_gmm: components must be >= 1");
  if (data.cols() == 0) throw ArgumentError("fit_gmm: zero-dimensional data");
  if (data.rows() < static_cast<std::size_t>(components)) {
    throw InsufficientDataError(
        "fit_gmm: " + std::to_string(data.rows()) + " points for " +
        std::to_string(components) + " components");
  }

  GmmFitResult best;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < std::max(1, options.restarts); ++attempt) {
    GmmParams start =
        initial_params(data, components, rng, options.variance_floor);
    GmmFitResult run = run_em(data, std::move(start), options);
    const double final_ll = run.log_likelihood.empty()
                                ? -std::numeric_limits<double>::infinity()
                                : run.log_likelihood.back();
    if (final_ll > best_ll) {
      best_ll = final_ll;
      best = std::move(run);
    }
  }
  return best;
}

}  // namespace nncp
