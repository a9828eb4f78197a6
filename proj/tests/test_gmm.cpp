#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nncp/errors.hpp"
#include "nncp/gmm.hpp"
#include "nncp/matrix.hpp"
#include "nncp/rng.hpp"

using namespace nncp;

namespace {

Matrix three_clusters(Rng& rng, std::size_t per_cluster, std::size_t dims) {
  const double centers[3] = {0.0, 50.0, 100.0};
  Matrix data(3 * per_cluster, dims);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < per_cluster; ++i) {
      for (std::size_t d = 0; d < dims; ++d) {
        data(c * per_cluster + i, d) = centers[c] + rng.normal();
      }
    }
  }
  return data;
}

}  // namespace

TEST_CASE("log_likelihood matches the closed form for one component") {
  GmmParams params;
  params.weights = {1.0};
  params.means = Matrix(1, 1, {0.0});
  params.variances = Matrix(1, 1, {1.0});

  Matrix data(2, 1, {0.0, 1.0});
  // log N(0;0,1) + log N(1;0,1) = -log(2*pi) - 0.5
  const double expected = -std::log(2.0 * 3.14159265358979323846) - 0.5;
  CHECK(log_likelihood(params, data) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("responsibilities rows sum to one") {
  Rng rng(5);
  Matrix data = three_clusters(rng, 10, 3);
  GmmParams params;
  params.weights = {0.5, 0.3, 0.2};
  params.means = Matrix(3, 3);
  params.means.fill(10.0);
  params.means(1, 0) = 60.0;
  params.means(2, 2) = 90.0;
  params.variances = Matrix(3, 3);
  params.variances.fill(25.0);

  Matrix r = responsibilities(params, data);
  REQUIRE(r.rows() == data.rows());
  REQUIRE(r.cols() == 3);
  for (std::size_t i = 0; i < r.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < r.cols(); ++j) {
      CHECK(r(i, j) >= 0.0);
      CHECK(r(i, j) <= 1.0);
      sum += r(i, j);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("responsibilities survive extreme separation") {
  GmmParams params;
  params.weights = {0.5, 0.5};
  params.means = Matrix(2, 1, {0.0, 1e6});
  params.variances = Matrix(2, 1, {1.0, 1.0});
  Matrix data(2, 1, {0.0, 1e6});

  Matrix r = responsibilities(params, data);
  CHECK(r(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isfinite(log_likelihood(params, data)));
}

TEST_CASE("dimension mismatches raise ShapeError") {
  GmmParams params;
  params.weights = {1.0};
  params.means = Matrix(1, 2, {0.0, 0.0});
  params.variances = Matrix(1, 2, {1.0, 1.0});
  Matrix data(3, 3);
  CHECK_THROWS_AS(log_likelihood(params, data), ShapeError);
  CHECK_THROWS_AS(responsibilities(params, data), ShapeError);
}

TEST_CASE("fit_gmm validates its arguments") {
  Rng rng(1);
  Matrix data(2, 2, {0.0, 0.0, 1.0, 1.0});
  CHECK_THROWS_AS(fit_gmm(data, 3, rng), InsufficientDataError);
  CHECK_THROWS_AS(fit_gmm(data, 0, rng), ArgumentError);
  Matrix empty(0, 0);
  CHECK_THROWS_AS(fit_gmm(empty, 1, rng), ArgumentError);
}

TEST_CASE("log-likelihood trajectory is non-decreasing") {
  for (std::uint64_t seed = 200; seed < 212; ++seed) {
    Rng data_rng(seed);
    Matrix data = sample_gaussian(data_rng, 30, 4);
    for (std::size_t i = 0; i < data.size(); ++i) {
      data.values()[i] = data.values()[i] * 5.0 + 10.0;
    }
    Rng fit_rng(seed + 5000);
    GmmFitResult fit = fit_gmm(data, 3, fit_rng);
    REQUIRE_FALSE(fit.log_likelihood.empty());
    for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i) {
      CHECK(fit.log_likelihood[i] >= fit.log_likelihood[i - 1] - 1e-9);
    }
    // Exposed parameters correspond to the last trajectory entry.
    CHECK(fit.log_likelihood.back() ==
          doctest::Approx(log_likelihood(fit.params, data)).epsilon(1e-9));
  }
}

TEST_CASE("three separated clusters are recovered") {
  Rng data_rng(77);
  Matrix data = three_clusters(data_rng, 40, 2);
  Rng fit_rng(78);
  GmmFitResult fit = fit_gmm(data, 3, fit_rng);

  std::vector<double> first_dim = {fit.params.means(0, 0),
                                   fit.params.means(1, 0),
                                   fit.params.means(2, 0)};
  std::sort(first_dim.begin(), first_dim.end());
  CHECK(first_dim[0] == doctest::Approx(0.0).epsilon(0.5));
  CHECK(first_dim[1] == doctest::Approx(50.0).epsilon(0.02));
  CHECK(first_dim[2] == doctest::Approx(100.0).epsilon(0.01));

  double weight_sum = 0.0;
  for (double w : fit.params.weights) {
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
    weight_sum += w;
    CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(0.15));
  }
  CHECK(weight_sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("variances respect the floor") {
  Matrix data(4, 2, {5.0, 1.0, 5.0, 1.0, 5.0, 1.0, 5.0, 1.0});
  Rng rng(9);
  GmmOptions options;
  options.variance_floor = 1e-6;
  GmmFitResult fit = fit_gmm(data, 2, rng, options);
  for (double v : fit.params.variances.values()) {
    CHECK(v >= options.variance_floor);
  }
  CHECK(std::isfinite(log_likelihood(fit.params, data)));
}

TEST_CASE("fits are deterministic in the rng stream") {
  Rng data_rng(300);
  Matrix data = sample_gaussian(data_rng, 25, 3);
  Rng r1(301);
  Rng r2(301);
  GmmFitResult a = fit_gmm(data, 3, r1);
  GmmFitResult b = fit_gmm(data, 3, r2);
  CHECK(a.params.weights == b.params.weights);
  CHECK(a.params.means == b.params.means);
  CHECK(a.params.variances == b.params.variances);
  CHECK(a.log_likelihood == b.log_likelihood);
}

TEST_CASE("single component recovers mean and variance") {
  Rng data_rng(44);
  const double mu = 7.0;
  const double sigma = 3.0;
  Matrix data(400, 1);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    data(i, 0) = mu + sigma * data_rng.normal();
  }
  Rng fit_rng(45);
  GmmFitResult fit = fit_gmm(data, 1, fit_rng);
  CHECK(fit.params.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.params.means(0, 0) == doctest::Approx(mu).epsilon(0.05));
  CHECK(fit.params.variances(0, 0) ==
        doctest::Approx(sigma * sigma).epsilon(0.15));
}
