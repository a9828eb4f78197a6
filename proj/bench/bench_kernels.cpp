#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "nncp/matrix.hpp"
#include "nncp/model.hpp"
#include "nncp/rng.hpp"
#include "nncp/synthetic.hpp"

namespace {

nncp::Matrix random_matrix(std::size_t rows, std::size_t cols,
                           std::uint64_t seed) {
  nncp::Rng rng(seed);
  return nncp::sample_gaussian(rng, rows, cols);
}

void BM_matmul_reference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const nncp::Matrix a = random_matrix(n, n, 1);
  const nncp::Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nncp::reference::matmul(a, b));
  }
}
BENCHMARK(BM_matmul_reference)->Arg(64)->Arg(256)->Arg(512);

void BM_matmul_parallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const nncp::Matrix a = random_matrix(n, n, 1);
  const nncp::Matrix b = random_matrix(n, n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nncp::matmul(a, b));
  }
}
BENCHMARK(BM_matmul_parallel)->Arg(64)->Arg(256)->Arg(512);

struct BatchFixture {
  nncp::Seq2SeqModel model;
  std::vector<nncp::TrainingExample> batch;
  nncp::Corpus corpus;

  explicit BatchFixture(int hidden) {
    nncp::SyntheticOptions options;
    options.n_papers = 256;
    nncp::Rng data_rng(7);
    corpus = nncp::generate_synthetic(data_rng, options);
    batch = nncp::make_examples(corpus, 5, 14);

    nncp::ModelConfig config;
    config.k = 5;
    config.n = 14;
    config.hidden_dim = hidden;
    nncp::Rng rng(11);
    model = nncp::init_model(config, rng);
  }
};

void BM_backward_reference(benchmark::State& state) {
  BatchFixture fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        nncp::reference::backward(fixture.model, fixture.batch));
  }
}
BENCHMARK(BM_backward_reference)->Arg(64)->Arg(128);

void BM_backward_parallel(benchmark::State& state) {
  BatchFixture fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nncp::backward(fixture.model, fixture.batch));
  }
}
BENCHMARK(BM_backward_parallel)->Arg(64)->Arg(128);

void BM_predict_corpus_reference(benchmark::State& state) {
  BatchFixture fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        nncp::reference::predict_corpus(fixture.model, fixture.corpus, 5));
  }
}
BENCHMARK(BM_predict_corpus_reference)->Arg(64)->Arg(128);

void BM_predict_corpus_parallel(benchmark::State& state) {
  BatchFixture fixture(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        nncp::predict_corpus(fixture.model, fixture.corpus, 5));
  }
}
BENCHMARK(BM_predict_corpus_parallel)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
