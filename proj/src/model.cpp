#include "nncp/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <string>

#include "nncp/errors.hpp"

namespace nncp {

namespace {

constexpr std::uint64_t kMaskSalt = 0x6e6e63702d6d736bULL;

// Papers per gradient block. Blocks are summed internally in paper order and
// reduced in block order afterwards, so the batch gradient is the same for
// any thread count.
constexpr std::size_t kGradBlock = 16;

struct MaskPair {
  std::vector<double> encoder;
  std::vector<double> decoder;
};

ParamSet zero_like(const ParamSet& shape) {
  ParamSet out;
  auto src = shape.tensors();
  auto dst = out.tensors();
  for (std::size_t i = 0; i < src.size(); ++i) {
    *dst[i] = Matrix(src[i]->rows(), src[i]->cols());
  }
  return out;
}

void add_into(ParamSet& total, const ParamSet& part) {
  auto dst = total.tensors();
  auto src = part.tensors();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    double* t = dst[i]->data();
    const double* p = src[i]->data();
    for (std::size_t j = 0; j < dst[i]->size(); ++j) t[j] += p[j];
  }
}

void scale(ParamSet& set, double factor) {
  for (Matrix* m : set.tensors()) {
    for (double& v : m->values()) v *= factor;
  }
}

// Forward pass with the intermediate activations kept for backprop.
struct Tape {
  std::vector<std::vector<double>> enc_pre;   // ze_t, t = 0..k
  std::vector<std::vector<double>> enc_post;  // he_t
  std::vector<std::vector<double>> dec_pre;   // zd_j, j = 0..T-1
  std::vector<std::vector<double>> dec_post;  // hd_j
  std::vector<double> head_pre;               // o_j before the output relu
  std::vector<double> outputs;                // p_j = max(0, o_j)
};

void recur_step(const Matrix& w_in, const Matrix& w_rec, const Matrix& bias,
                const double* mask, double input, const double* h_prev,
                std::vector<double>& pre, std::vector<double>& post) {
  const std::size_t h = w_rec.rows();
  pre.resize(h);
  post.resize(h);
  matvec(w_rec, h_prev, pre.data());
  for (std::size_t i = 0; i < h; ++i) {
    double gate = mask ? mask[i] : 1.0;
    pre[i] += gate * w_in(i, 0) * input + bias(i, 0);
    post[i] = pre[i] > 0.0 ? pre[i] : 0.0;
  }
}

void forward_example(const Seq2SeqModel& model, const TrainingExample& ex,
                     const MaskPair* masks, Tape& tape) {
  const std::size_t h = static_cast<std::size_t>(model.config.hidden_dim);
  const std::size_t steps_in = ex.inputs.size();
  const std::size_t steps_out = ex.teacher.size();
  const double* mask_e = masks ? masks->encoder.data() : nullptr;
  const double* mask_d = masks ? masks->decoder.data() : nullptr;

  tape.enc_pre.resize(steps_in);
  tape.enc_post.resize(steps_in);
  std::vector<double> zeros(h, 0.0);
  const double* h_prev = zeros.data();
  for (std::size_t t = 0; t < steps_in; ++t) {
    recur_step(model.params.enc_w_in, model.params.enc_w_rec,
               model.params.enc_bias, mask_e, ex.inputs[t], h_prev,
               tape.enc_pre[t], tape.enc_post[t]);
    h_prev = tape.enc_post[t].data();
  }

  tape.dec_pre.resize(steps_out);
  tape.dec_post.resize(steps_out);
  tape.head_pre.resize(steps_out);
  tape.outputs.resize(steps_out);
  for (std::size_t j = 0; j < steps_out; ++j) {
    recur_step(model.params.dec_w_in, model.params.dec_w_rec,
               model.params.dec_bias, mask_d, ex.teacher[j], h_prev,
               tape.dec_pre[j], tape.dec_post[j]);
    h_prev = tape.dec_post[j].data();
    double o = model.params.out_b(0, 0);
    for (std::size_t i = 0; i < h; ++i) {
      o += model.params.out_w(i, 0) * tape.dec_post[j][i];
    }
    tape.head_pre[j] = o;
    tape.outputs[j] = o > 0.0 ? o : 0.0;
  }
}

double tape_loss(const Tape& tape, const std::vector<double>& targets) {
  double sum = 0.0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    double d = tape.outputs[j] - targets[j];
    sum += d * d;
  }
  return sum / static_cast<double>(targets.size());
}

// Gradient of this one paper's mean-squared loss, added into g.
void backward_example(const Seq2SeqModel& model, const TrainingExample& ex,
                      const MaskPair* masks, const Tape& tape, Gradients& g) {
  const std::size_t h = static_cast<std::size_t>(model.config.hidden_dim);
  const std::size_t steps_in = ex.inputs.size();
  const std::size_t steps_out = ex.teacher.size();
  const double* mask_e = masks ? masks->encoder.data() : nullptr;
  const double* mask_d = masks ? masks->decoder.data() : nullptr;
  const double inv_t = 1.0 / static_cast<double>(steps_out);

  std::vector<double> dh(h, 0.0);
  std::vector<double> dz(h);
  std::vector<double> zeros(h, 0.0);

  for (std::size_t jj = steps_out; jj-- > 0;) {
    double dp = 2.0 * inv_t * (tape.outputs[jj] - ex.targets[jj]);
    double dhead = tape.head_pre[jj] > 0.0 ? dp : 0.0;
    g.out_b(0, 0) += dhead;
    for (std::size_t i = 0; i < h; ++i) {
      g.out_w(i, 0) += dhead * tape.dec_post[jj][i];
      dh[i] += dhead * model.params.out_w(i, 0);
      dz[i] = tape.dec_pre[jj][i] > 0.0 ? dh[i] : 0.0;
    }
    const double* h_before =
        jj > 0 ? tape.dec_post[jj - 1].data() : tape.enc_post[steps_in - 1].data();
    for (std::size_t i = 0; i < h; ++i) {
      g.dec_bias(i, 0) += dz[i];
      double gate = mask_d ? mask_d[i] : 1.0;
      g.dec_w_in(i, 0) += dz[i] * gate * ex.teacher[jj];
    }
    outer_add(g.dec_w_rec, dz.data(), h_before);
    std::fill(dh.begin(), dh.end(), 0.0);
    matvec_transpose_add(model.params.dec_w_rec, dz.data(), dh.data());
  }

  for (std::size_t tt = steps_in; tt-- > 0;) {
    for (std::size_t i = 0; i < h; ++i) {
      dz[i] = tape.enc_pre[tt][i] > 0.0 ? dh[i] : 0.0;
      g.enc_bias(i, 0) += dz[i];
      double gate = mask_e ? mask_e[i] : 1.0;
      g.enc_w_in(i, 0) += dz[i] * gate * ex.inputs[tt];
    }
    const double* h_before = tt > 0 ? tape.enc_post[tt - 1].data() : zeros.data();
    outer_add(g.enc_w_rec, dz.data(), h_before);
    std::fill(dh.begin(), dh.end(), 0.0);
    matvec_transpose_add(model.params.enc_w_rec, dz.data(), dh.data());
  }
}

// Mean-loss gradient over the referenced papers. Partial sums live in
// per-block accumulators filled in paper order; the final reduction walks
// blocks in index order outside the parallel region.
Gradients block_gradients(const Seq2SeqModel& model,
                          std::span<const TrainingExample* const> papers,
                          std::span<const MaskPair> masks, bool parallel,
                          double* mean_loss_out) {
  const std::size_t count = papers.size();
  const std::size_t blocks = (count + kGradBlock - 1) / kGradBlock;
  std::vector<Gradients> partial(blocks);
  std::vector<double> partial_loss(blocks, 0.0);

#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t b = 0; b < blocks; ++b) {
    Gradients acc = zero_like(model.params);
    Tape tape;
    double loss_sum = 0.0;
    const std::size_t lo = b * kGradBlock;
    const std::size_t hi = std::min(lo + kGradBlock, count);
    for (std::size_t p = lo; p < hi; ++p) {
      const MaskPair* mask = masks.empty() ? nullptr : &masks[p];
      forward_example(model, *papers[p], mask, tape);
      loss_sum += tape_loss(tape, papers[p]->targets);
      backward_example(model, *papers[p], mask, tape, acc);
    }
    partial[b] = std::move(acc);
    partial_loss[b] = loss_sum;
  }

  Gradients total = zero_like(model.params);
  double loss_sum = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    add_into(total, partial[b]);
    loss_sum += partial_loss[b];
  }
  scale(total, 1.0 / static_cast<double>(count));
  if (mean_loss_out) *mean_loss_out = loss_sum / static_cast<double>(count);
  return total;
}

Gradients batch_backward(const Seq2SeqModel& model,
                         std::span<const TrainingExample> batch,
                         bool parallel) {
  if (batch.empty()) throw ArgumentError("backward: empty batch");
  std::vector<const TrainingExample*> refs(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) refs[i] = &batch[i];
  return block_gradients(model, refs, {}, parallel, nullptr);
}

MaskPair draw_masks(std::uint64_t seed, int hidden_dim, double rate) {
  Rng rng(seed);
  MaskPair masks;
  masks.encoder.resize(static_cast<std::size_t>(hidden_dim));
  masks.decoder.resize(static_cast<std::size_t>(hidden_dim));
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& v : masks.encoder) {
    v = rng.uniform01() < rate ? 0.0 : keep_scale;
  }
  for (double& v : masks.decoder) {
    v = rng.uniform01() < rate ? 0.0 : keep_scale;
  }
  return masks;
}

double global_norm(const Gradients& g) {
  double sum = 0.0;
  for (const Matrix* m : g.tensors()) {
    for (double v : m->values()) sum += v * v;
  }
  return std::sqrt(sum);
}

}  // namespace

void ModelConfig::validate() const {
  if (k < 0 || k >= n) {
    throw ArgumentError("model config: need 0 <= k < n, got k=" +
                        std::to_string(k) + " n=" + std::to_string(n));
  }
  if (hidden_dim < 1) {
    throw ArgumentError("model config: hidden_dim must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ArgumentError("model config: dropout_rate must be in [0, 1)");
  }
  if (epochs < 0) throw ArgumentError("model config: epochs must be >= 0");
  if (!(learning_rate > 0.0)) {
    throw ArgumentError("model config: learning_rate must be > 0");
  }
  if (batch_size < 1) {
    throw ArgumentError("model config: batch_size must be >= 1");
  }
  if (!(rmsprop_rho >= 0.0 && rmsprop_rho < 1.0)) {
    throw ArgumentError("model config: rmsprop rho must be in [0, 1)");
  }
  if (!(rmsprop_epsilon > 0.0)) {
    throw ArgumentError("model config: rmsprop epsilon must be > 0");
  }
  if (clip_norm < 0.0) {
    throw ArgumentError("model config: clip_norm must be >= 0");
  }
}

std::array<Matrix*, 8> ParamSet::tensors() {
  return {&enc_w_in, &enc_w_rec, &enc_bias, &dec_w_in,
          &dec_w_rec, &dec_bias, &out_w,    &out_b};
}

std::array<const Matrix*, 8> ParamSet::tensors() const {
  return {&enc_w_in, &enc_w_rec, &enc_bias, &dec_w_in,
          &dec_w_rec, &dec_bias, &out_w,    &out_b};
}

void ParamSet::zero() {
  for (Matrix* m : tensors()) m->fill(0.0);
}

std::size_t ParamSet::parameter_count() const {
  std::size_t total = 0;
  for (const Matrix* m : tensors()) total += m->size();
  return total;
}

OptimizerState OptimizerState::for_model(const Seq2SeqModel& model) {
  OptimizerState state;
  state.accumulators = zero_like(model.params);
  state.rho = model.config.rmsprop_rho;
  state.epsilon = model.config.rmsprop_epsilon;
  return state;
}

Seq2SeqModel init_model(const ModelConfig& config, Rng& rng) {
  config.validate();
  const auto h = static_cast<std::size_t>(config.hidden_dim);
  const double limit = std::sqrt(6.0 / (1.0 + static_cast<double>(h)));

  Seq2SeqModel model;
  model.config = config;
  model.params.enc_w_in = sample_uniform(rng, -limit, limit, h, 1);
  model.params.enc_w_rec = random_orthogonal(rng, h);
  model.params.enc_bias = Matrix(h, 1);
  model.params.dec_w_in = sample_uniform(rng, -limit, limit, h, 1);
  model.params.dec_w_rec = random_orthogonal(rng, h);
  model.params.dec_bias = Matrix(h, 1);
  model.params.out_w = sample_uniform(rng, -limit, limit, h, 1);
  model.params.out_b = Matrix(1, 1);
  return model;
}

std::vector<double> encode(const Seq2SeqModel& model,
                           std::span<const double> inputs) {
  const auto want = static_cast<std::size_t>(model.config.k) + 1;
  if (inputs.size() != want) {
    throw ShapeError("encode: expected " + std::to_string(want) +
                     " inputs, got " + std::to_string(inputs.size()));
  }
  const auto h = static_cast<std::size_t>(model.config.hidden_dim);
  std::vector<double> state(h, 0.0);
  std::vector<double> pre, post;
  for (double value : inputs) {
    recur_step(model.params.enc_w_in, model.params.enc_w_rec,
               model.params.enc_bias, nullptr, value, state.data(), pre, post);
    state = post;
  }
  return state;
}

std::vector<double> decode_train(const Seq2SeqModel& model,
                                 std::span<const double> encoder_state,
                                 std::span<const double> teacher) {
  const auto h = static_cast<std::size_t>(model.config.hidden_dim);
  const auto want =
      static_cast<std::size_t>(model.config.n - model.config.k);
  if (encoder_state.size() != h) {
    throw ShapeError("decode_train: encoder state has " +
                     std::to_string(encoder_state.size()) + " units, model " +
                     std::to_string(h));
  }
  if (teacher.size() != want) {
    throw ShapeError("decode_train: expected " + std::to_string(want) +
                     " teacher values, got " + std::to_string(teacher.size()));
  }
  std::vector<double> state(encoder_state.begin(), encoder_state.end());
  std::vector<double> pre, post, outputs;
  outputs.reserve(teacher.size());
  for (double value : teacher) {
    recur_step(model.params.dec_w_in, model.params.dec_w_rec,
               model.params.dec_bias, nullptr, value, state.data(), pre, post);
    state = post;
    double o = model.params.out_b(0, 0);
    for (std::size_t i = 0; i < h; ++i) {
      o += model.params.out_w(i, 0) * state[i];
    }
    outputs.push_back(o > 0.0 ? o : 0.0);
  }
  return outputs;
}

std::vector<double> decode_sample(const Seq2SeqModel& model,
                                  std::span<const double> encoder_state,
                                  double c_k) {
  const auto h = static_cast<std::size_t>(model.config.hidden_dim);
  if (encoder_state.size() != h) {
    throw ShapeError("decode_sample: encoder state has " +
                     std::to_string(encoder_state.size()) + " units, model " +
                     std::to_string(h));
  }
  const int steps = model.config.n - model.config.k;
  std::vector<double> state(encoder_state.begin(), encoder_state.end());
  std::vector<double> pre, post, outputs;
  outputs.reserve(static_cast<std::size_t>(steps));
  double feed = c_k;
  for (int j = 0; j < steps; ++j) {
    recur_step(model.params.dec_w_in, model.params.dec_w_rec,
               model.params.dec_bias, nullptr, feed, state.data(), pre, post);
    state = post;
    double o = model.params.out_b(0, 0);
    for (std::size_t i = 0; i < h; ++i) {
      o += model.params.out_w(i, 0) * state[i];
    }
    feed = o > 0.0 ? o : 0.0;
    outputs.push_back(feed);
  }
  return outputs;
}

double mse_loss(std::span<const double> predictions,
                std::span<const double> targets) {
  if (predictions.size() != targets.size()) {
    throw ShapeError("loss: " + std::to_string(predictions.size()) +
                     " predictions vs " + std::to_string(targets.size()) +
                     " targets");
  }
  if (predictions.empty()) throw ShapeError("loss: empty sequences");
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    double d = predictions[i] - targets[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

Gradients backward(const Seq2SeqModel& model,
                   std::span<const TrainingExample> batch) {
  return batch_backward(model, batch, true);
}

double batch_loss(const Seq2SeqModel& model,
                  std::span<const TrainingExample> batch) {
  if (batch.empty()) throw ArgumentError("batch_loss: empty batch");
  Tape tape;
  double sum = 0.0;
  for (const TrainingExample& ex : batch) {
    forward_example(model, ex, nullptr, tape);
    sum += tape_loss(tape, ex.targets);
  }
  return sum / static_cast<double>(batch.size());
}

void rmsprop_step(Seq2SeqModel& model, const Gradients& gradients,
                  OptimizerState& state, double learning_rate) {
  auto params = model.params.tensors();
  auto grads = gradients.tensors();
  auto accum = state.accumulators.tensors();
  for (std::size_t m = 0; m < params.size(); ++m) {
    if (params[m]->rows() != grads[m]->rows() ||
        params[m]->cols() != grads[m]->cols()) {
      throw ShapeError("rmsprop_step: gradient shape mismatch");
    }
    double* p = params[m]->data();
    const double* g = grads[m]->data();
    double* v = accum[m]->data();
    for (std::size_t i = 0; i < params[m]->size(); ++i) {
      v[i] = state.rho * v[i] + (1.0 - state.rho) * g[i] * g[i];
      p[i] -= learning_rate * g[i] / (std::sqrt(v[i]) + state.epsilon);
    }
  }
}

std::vector<TrainingExample> make_examples(const Corpus& corpus, int k,
                                           int n) {
  if (k < 0 || k >= n) {
    throw ArgumentError("make_examples: need 0 <= k < n");
  }
  std::vector<TrainingExample> examples;
  examples.reserve(corpus.records.size());
  for (const CitationRecord& record : corpus.records) {
    if (record.citations.size() < static_cast<std::size_t>(n) + 1) {
      throw ArgumentError("record " + record.paper_id + " has " +
                          std::to_string(record.citations.size()) +
                          " years, horizon needs " + std::to_string(n + 1));
    }
    TrainingExample ex;
    ex.inputs.reserve(static_cast<std::size_t>(k) + 1);
    for (int t = 0; t <= k; ++t) {
      ex.inputs.push_back(static_cast<double>(record.citations[t]));
    }
    ex.teacher.reserve(static_cast<std::size_t>(n - k));
    ex.targets.reserve(static_cast<std::size_t>(n - k));
    for (int t = k; t < n; ++t) {
      ex.teacher.push_back(static_cast<double>(record.citations[t]));
      ex.targets.push_back(static_cast<double>(record.citations[t + 1]));
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

TrainResult train(const ModelConfig& config, const Corpus& corpus) {
  config.validate();
  if (corpus.records.empty()) {
    throw ArgumentError("train: empty corpus");
  }
  const std::vector<TrainingExample> examples =
      make_examples(corpus, config.k, config.n);
  const std::size_t count = examples.size();

  Rng rng(config.seed);
  TrainResult result;
  result.model = init_model(config, rng);
  OptimizerState opt = OptimizerState::for_model(result.model);

  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;

  const auto batch_size = static_cast<std::size_t>(config.batch_size);
  std::vector<const TrainingExample*> refs;
  std::vector<MaskPair> masks;
  result.epoch_losses.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss_sum = 0.0;
    for (std::size_t start = 0; start < count; start += batch_size) {
      const std::size_t end = std::min(start + batch_size, count);
      refs.clear();
      masks.clear();
      for (std::size_t pos = start; pos < end; ++pos) {
        refs.push_back(&examples[order[pos]]);
        if (config.dropout_rate > 0.0) {
          std::uint64_t mask_seed = mix_seed(
              mix_seed(config.seed ^ kMaskSalt,
                       static_cast<std::uint64_t>(epoch)),
              static_cast<std::uint64_t>(pos));
          masks.push_back(draw_masks(mask_seed, config.hidden_dim,
                                     config.dropout_rate));
        }
      }
      double batch_mean_loss = 0.0;
      Gradients grads =
          block_gradients(result.model, refs, masks, true, &batch_mean_loss);
      if (config.clip_norm > 0.0) {
        double norm = global_norm(grads);
        if (norm > config.clip_norm) scale(grads, config.clip_norm / norm);
      }
      rmsprop_step(result.model, grads, opt, config.learning_rate);
      epoch_loss_sum += batch_mean_loss * static_cast<double>(end - start);
    }
    result.epoch_losses.push_back(epoch_loss_sum /
                                  static_cast<double>(count));
  }
  return result;
}

PredictionResult predict(const Seq2SeqModel& model,
                         const CitationRecord& record, int k) {
  if (k != model.config.k) {
    throw ArgumentError("predict: model was trained with k=" +
                        std::to_string(model.config.k) + ", asked for k=" +
                        std::to_string(k));
  }
  if (record.citations.size() < static_cast<std::size_t>(k) + 1) {
    throw ArgumentError("predict: record " + record.paper_id + " has " +
                        std::to_string(record.citations.size()) +
                        " observed years, need " + std::to_string(k + 1));
  }
  std::vector<double> inputs(static_cast<std::size_t>(k) + 1);
  for (int t = 0; t <= k; ++t) {
    inputs[static_cast<std::size_t>(t)] =
        static_cast<double>(record.citations[static_cast<std::size_t>(t)]);
  }
  std::vector<double> state = encode(model, inputs);
  PredictionResult out;
  out.paper_id = record.paper_id;
  out.yearly = decode_sample(model, state, inputs.back());
  out.total = 0.0;
  for (double v : out.yearly) out.total += v;
  return out;
}

std::vector<PredictionResult> predict_corpus(const Seq2SeqModel& model,
                                             const Corpus& corpus, int k) {
  std::vector<PredictionResult> results(corpus.records.size());
  std::exception_ptr error = nullptr;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      results[i] = predict(model, corpus.records[i], k);
    } catch (...) {
#pragma omp critical(nncp_predict_corpus_error)
      {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return results;
}

namespace reference {

Gradients backward(const Seq2SeqModel& model,
                   std::span<const TrainingExample> batch) {
  return batch_backward(model, batch, false);
}

std::vector<PredictionResult> predict_corpus(const Seq2SeqModel& model,
                                             const Corpus& corpus, int k) {
  std::vector<PredictionResult> results;
  results.reserve(corpus.records.size());
  for (const CitationRecord& record : corpus.records) {
    results.push_back(predict(model, record, k));
  }
  return results;
}

}  // namespace reference

}  // namespace nncp
