#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nncp/dataset.hpp"
#include "nncp/model.hpp"
#include "nncp/report.hpp"

namespace nncp {

/// Everything a command run needs, filled from CLI flags. Commands read
/// the fields relevant to them and ignore the rest.
struct ExperimentSpec {
  std::string corpus_path;
  int train_lo = 1980;
  int train_hi = 1997;
  int test_lo = 1998;
  int test_hi = 2002;
  int k = 5;
  int n = 14;
  std::vector<std::string> methods = {"NNCP", "MEY", "AVR", "GMM"};
  std::size_t neighbors = 20;
  int hidden_dim = 512;
  int epochs = 100;
  double learning_rate = 1e-5;
  int batch_size = 256;
  double dropout_rate = 0.2;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  bool yearly_pooled = false;
  std::string model_path;        // predict: checkpoint to load
  std::size_t synth_papers = 2000;
  std::string journal_mix;       // synth: "NAME:FRAC,..." or empty = default

  ModelConfig model_config(int k_override) const;
};

/// The method universe in presentation order.
const std::vector<std::string>& canonical_methods();

/// Uppercases, validates against the universe, de-duplicates, and returns
/// the requested methods in canonical order. Throws ArgumentError for an
/// empty list or an unknown name.
std::vector<std::string> normalize_methods(
    const std::vector<std::string>& requested);

struct EvaluationOutcome {
  EvaluationReport report;
  std::vector<double> nncp_epoch_losses;
  bool has_model = false;
  Seq2SeqModel model;
};

/// Splits the corpus by publication year, trains the model when NNCP is
/// requested, predicts the test split with every requested method, and
/// scores per journal (plus the pooled "ALL" row) in total and yearly
/// modes (and yearly_pooled when asked).
EvaluationOutcome evaluate_experiment(const Corpus& corpus,
                                      const ExperimentSpec& spec);

/// Ranks each journal's test papers by actual total citations, takes the
/// top target_rank (or the whole journal when smaller), and counts which
/// method predicts each paper's future years with the smallest RMSE; exact
/// ties split the credit evenly.
Top100Report top100_experiment(const Corpus& corpus,
                               const ExperimentSpec& spec,
                               std::size_t target_rank = 100);

/// Sweeps k over 0..7 against the fixed scoring window (years 7..n, known
/// years excluded once k reaches the window). NNCP retrains per k; pass a
/// cache directory to reuse checkpoints across runs, empty to disable.
SensitivityReport sensitivity_experiment(const Corpus& corpus,
                                         const ExperimentSpec& spec,
                                         const std::string& cache_dir);

// Command entry points: load inputs, run, write every output file under
// spec.out_dir. Each is a pure function of (spec, input files).
void run_evaluate(const ExperimentSpec& spec);
void run_train(const ExperimentSpec& spec);
void run_predict(const ExperimentSpec& spec);
void run_top100(const ExperimentSpec& spec);
void run_sensitivity(const ExperimentSpec& spec);
SynthReport run_synth(const ExperimentSpec& spec);

}  // namespace nncp
