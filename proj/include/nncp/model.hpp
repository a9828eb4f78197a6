#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nncp/dataset.hpp"
#include "nncp/matrix.hpp"
#include "nncp/rng.hpp"

namespace nncp {

/// Hyperparameters of the sequence-to-sequence citation predictor.
/// Inputs are the raw counts c_0..c_k (no normalization); outputs are
/// predictions for years k+1..n.
struct ModelConfig {
  int k = 5;
  int n = 14;
  int hidden_dim = 512;
  double dropout_rate = 0.2;
  int epochs = 100;
  double learning_rate = 1e-5;
  int batch_size = 256;
  std::uint64_t seed = 42;

  double rmsprop_rho = 0.9;
  double rmsprop_epsilon = 1e-8;
  // Global-norm gradient clip; 0 disables it, which is the default so that
  // divergence at pathological learning rates stays observable.
  double clip_norm = 0.0;

  void validate() const;  // throws ArgumentError on any bad field
};

/// All trainable tensors. w_in columns map the scalar input onto the hidden
/// units; w_rec is the hidden-to-hidden map; out_w/out_b form the scalar
/// readout. Gradients and optimizer accumulators reuse the same layout.
struct ParamSet {
  Matrix enc_w_in;   // H x 1
  Matrix enc_w_rec;  // H x H
  Matrix enc_bias;   // H x 1
  Matrix dec_w_in;   // H x 1
  Matrix dec_w_rec;  // H x H
  Matrix dec_bias;   // H x 1
  Matrix out_w;      // H x 1
  Matrix out_b;      // 1 x 1

  std::array<Matrix*, 8> tensors();
  std::array<const Matrix*, 8> tensors() const;
  void zero();
  std::size_t parameter_count() const;

  bool operator==(const ParamSet& other) const = default;
};

using Gradients = ParamSet;

struct Seq2SeqModel {
  ModelConfig config;
  ParamSet params;

  std::size_t parameter_count() const { return params.parameter_count(); }
};

/// Per-parameter accumulators of squared gradients for RMSProp.
struct OptimizerState {
  ParamSet accumulators;
  double rho = 0.9;
  double epsilon = 1e-8;

  static OptimizerState for_model(const Seq2SeqModel& model);
};

/// One paper prepared for training: inputs c_0..c_k, the teacher sequence
/// c_k..c_{n-1} fed to the decoder, and targets c_{k+1}..c_n.
struct TrainingExample {
  std::vector<double> inputs;
  std::vector<double> teacher;
  std::vector<double> targets;
};

struct PredictionResult {
  std::string paper_id;
  std::vector<double> yearly;  // predictions for years k+1..n, all >= 0
  double total = 0.0;          // sum of yearly, computed by summation
};

struct TrainResult {
  Seq2SeqModel model;
  std::vector<double> epoch_losses;  // mean per-paper loss per epoch
};

/// Glorot-uniform input/output weights, orthogonal recurrent weights, zero
/// biases. Deterministic given the rng stream; tensors are drawn in
/// declaration order (enc_w_in, enc_w_rec, dec_w_in, dec_w_rec, out_w).
Seq2SeqModel init_model(const ModelConfig& config, Rng& rng);

/// Runs the encoder recurrence h <- relu(w_in*c_t + w_rec*h + bias) over
/// the k+1 inputs, starting from the all-zero state. Returns the final
/// hidden state. Throws ShapeError if inputs length != k+1.
std::vector<double> encode(const Seq2SeqModel& model,
                           std::span<const double> inputs);

/// Teacher-forced decoding: starting from the encoder state, consumes the
/// ground-truth previous citation at each step and emits one prediction per
/// step through the relu output head. Returns teacher.size() predictions.
std::vector<double> decode_train(const Seq2SeqModel& model,
                                 std::span<const double> encoder_state,
                                 std::span<const double> teacher);

/// Free-running decoding: the first step consumes c_k, later steps consume
/// the model's own previous prediction. Emits n-k values; dropout never
/// applies here.
std::vector<double> decode_sample(const Seq2SeqModel& model,
                                  std::span<const double> encoder_state,
                                  double c_k);

/// Mean squared error over the output positions.
double mse_loss(std::span<const double> predictions,
                std::span<const double> targets);

/// Exact gradients of the mean batch loss for every parameter, by
/// backpropagation through time across decoder and encoder. The relu
/// subgradient at exactly 0 is 0. Parallelized over papers in fixed-size
/// blocks whose partial sums reduce in block order, so the result is
/// bit-identical for any thread count (and to reference::backward).
Gradients backward(const Seq2SeqModel& model,
                   std::span<const TrainingExample> batch);

/// Mean per-paper loss of a batch under teacher forcing, dropout off.
double batch_loss(const Seq2SeqModel& model,
                  std::span<const TrainingExample> batch);

/// accumulator <- rho*accumulator + (1-rho)*g^2;
/// parameter <- parameter - lr*g/(sqrt(accumulator) + epsilon).
void rmsprop_step(Seq2SeqModel& model, const Gradients& gradients,
                  OptimizerState& state, double learning_rate);

/// Builds training examples for every record (requires horizon >= n).
std::vector<TrainingExample> make_examples(const Corpus& corpus, int k, int n);

/// Full training loop: per epoch, shuffle with the seeded rng, then for each
/// batch run the masked forward/backward and one RMSProp step. Dropout draws
/// a fresh mask per sequence per epoch from a stream derived from (seed,
/// epoch, position), so results do not depend on thread count.
TrainResult train(const ModelConfig& config, const Corpus& corpus);

/// Encode c_0..c_k of the record, decode free-running, assemble the result
/// with total = sum(yearly). Throws ArgumentError if the record has fewer
/// than k+1 observed years.
PredictionResult predict(const Seq2SeqModel& model,
                         const CitationRecord& record, int k);

/// Per-paper parallel prediction over a whole corpus; output order matches
/// record order regardless of scheduling.
std::vector<PredictionResult> predict_corpus(const Seq2SeqModel& model,
                                             const Corpus& corpus, int k);

namespace reference {
/// Serial twins of the parallel kernels, kept as oracles for tests and for
/// the benchmark target. Results are bit-identical to the parallel paths.
Gradients backward(const Seq2SeqModel& model,
                   std::span<const TrainingExample> batch);
std::vector<PredictionResult> predict_corpus(const Seq2SeqModel& model,
                                             const Corpus& corpus, int k);
}  // namespace reference

}  // namespace nncp
