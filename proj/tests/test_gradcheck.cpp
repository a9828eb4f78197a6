#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nncp/model.hpp"
#include "nncp/rng.hpp"
#include "nncp/synthetic.hpp"

using namespace nncp;

namespace {

constexpr double kEps = 1e-5;
constexpr double kTolerance = 1e-4;

struct GradCheckOutcome {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

double central_difference(Seq2SeqModel& model,
                          std::span<const TrainingExample> batch,
                          Matrix& tensor, std::size_t i, double eps) {
  const double saved = tensor.values()[i];
  tensor.values()[i] = saved + eps;
  const double up = batch_loss(model, batch);
  tensor.values()[i] = saved - eps;
  const double down = batch_loss(model, batch);
  tensor.values()[i] = saved;
  return (up - down) / (2.0 * eps);
}

// The denominator floor marks the scale below which a central difference
// of a loss this size carries no signal (cancellation leaves ~1e-8 of
// absolute noise); coordinates that small are compared absolutely.
double relative_error(double numeric, double exact) {
  return std::abs(numeric - exact) /
         std::max({std::abs(numeric), std::abs(exact), 1e-3});
}

// Central finite differences of the mean batch loss against the analytic
// gradient, every parameter entry individually. A coordinate whose secant
// straddles a relu kink looks wrong at eps = 1e-5 but converges once eps
// shrinks, while cancellation noise does the opposite, so offenders are
// re-measured at 1e-7 and the smaller error wins; a genuine gradient bug
// keeps its error at every scale.
GradCheckOutcome finite_difference_check(Seq2SeqModel model,
                                         std::span<const TrainingExample> batch) {
  const Gradients analytic = backward(model, batch);
  auto params = model.params.tensors();
  auto grads = analytic.tensors();

  GradCheckOutcome outcome;
  for (std::size_t m = 0; m < params.size(); ++m) {
    Matrix& tensor = *params[m];
    const Matrix& grad = *grads[m];
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double exact = grad.values()[i];
      double rel = relative_error(
          central_difference(model, batch, tensor, i, kEps), exact);
      if (rel >= kTolerance) {
        rel = std::min(rel, relative_error(
            central_difference(model, batch, tensor, i, 1e-7), exact));
      }
      outcome.max_rel_error = std::max(outcome.max_rel_error, rel);
      ++outcome.checked;
    }
  }
  return outcome;
}

std::vector<TrainingExample> sample_batch(std::uint64_t seed, int n, int k,
                                          std::size_t papers) {
  SyntheticOptions options;
  options.n_papers = papers;
  options.horizon_n = n;
  Rng rng(seed);
  Corpus corpus = generate_synthetic(rng, options);
  return make_examples(corpus, k, n);
}

// Fresh models sit exactly on relu kinks (zero biases, zero counts), where
// the loss is not differentiable and central differences see half-slopes.
// Nudging the biases moves the check to a generic point.
void jitter_biases(Seq2SeqModel& model, Rng& rng) {
  for (Matrix* tensor : {&model.params.enc_bias, &model.params.dec_bias,
                         &model.params.out_b}) {
    for (double& v : tensor->values()) v += rng.uniform(0.05, 0.35);
  }
}

}  // namespace

TEST_CASE("analytic gradients match finite differences on small models") {
  std::uint64_t seed = 100;
  for (int hidden : {4, 8}) {
    for (auto [k, n] : {std::pair<int, int>{1, 3}, {2, 5}}) {
      ModelConfig config;
      config.k = k;
      config.n = n;
      config.hidden_dim = hidden;
      config.dropout_rate = 0.0;

      Rng rng(seed);
      Seq2SeqModel model = init_model(config, rng);
      jitter_biases(model, rng);
      auto batch = sample_batch(seed + 1, n, k, 3);
      seed += 2;

      GradCheckOutcome outcome = finite_difference_check(model, batch);
      CAPTURE(hidden);
      CAPTURE(k);
      CAPTURE(n);
      CHECK(outcome.checked ==
            2ul * hidden * hidden + 5ul * hidden + 1ul);
      CHECK(outcome.max_rel_error < kTolerance);
    }
  }
}

TEST_CASE("gradients stay exact after a few optimizer steps") {
  ModelConfig config;
  config.k = 2;
  config.n = 5;
  config.hidden_dim = 6;
  config.dropout_rate = 0.0;

  Rng rng(500);
  Seq2SeqModel model = init_model(config, rng);
  jitter_biases(model, rng);
  auto batch = sample_batch(501, config.n, config.k, 4);

  OptimizerState state = OptimizerState::for_model(model);
  for (int step = 0; step < 3; ++step) {
    Gradients grads = backward(model, batch);
    rmsprop_step(model, grads, state, 1e-3);
  }

  GradCheckOutcome outcome = finite_difference_check(model, batch);
  CHECK(outcome.max_rel_error < kTolerance);
}

TEST_CASE("single-example gradient equals the batch-of-one gradient") {
  ModelConfig config;
  config.k = 1;
  config.n = 4;
  config.hidden_dim = 5;
  config.dropout_rate = 0.0;

  Rng rng(600);
  Seq2SeqModel model = init_model(config, rng);
  auto batch = sample_batch(601, config.n, config.k, 2);

  // Mean of per-example gradients equals the batch gradient.
  Gradients whole = backward(model, batch);
  Gradients first = backward(model, std::span(batch).subspan(0, 1));
  Gradients second = backward(model, std::span(batch).subspan(1, 1));

  auto w = whole.tensors();
  auto a = first.tensors();
  auto b = second.tensors();
  for (std::size_t m = 0; m < w.size(); ++m) {
    for (std::size_t i = 0; i < w[m]->size(); ++i) {
      const double mean =
          0.5 * (a[m]->values()[i] + b[m]->values()[i]);
      CHECK(w[m]->values()[i] == doctest::Approx(mean).epsilon(1e-12));
    }
  }
}
