#include "nncp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <string>

#include "nncp/baselines.hpp"
#include "nncp/checkpoint.hpp"
#include "nncp/errors.hpp"
#include "nncp/metrics.hpp"
#include "nncp/rng.hpp"
#include "nncp/synthetic.hpp"

namespace nncp {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// Runs fn(i) for every index in parallel, surfacing the first exception
// after the loop instead of letting it terminate the process.
template <typename Fn>
void parallel_over(std::size_t count, Fn&& fn) {
  std::exception_ptr error = nullptr;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < count; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(nncp_parallel_over_error)
      {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

struct PredictionSet {
  std::map<std::string, std::vector<PredictionResult>> by_method;
  std::map<std::string, FallbackStats> fallbacks;
  std::vector<double> nncp_losses;
  Seq2SeqModel model;
  bool has_model = false;
};

bool config_matches(const ModelConfig& a, const ModelConfig& b) {
  return a.k == b.k && a.n == b.n && a.hidden_dim == b.hidden_dim &&
         a.dropout_rate == b.dropout_rate && a.epochs == b.epochs &&
         a.learning_rate == b.learning_rate && a.batch_size == b.batch_size &&
         a.seed == b.seed;
}

std::string cache_file_name(const ModelConfig& config,
                            std::uint64_t fingerprint) {
  char tail[32];
  std::snprintf(tail, sizeof(tail), "%016llx",
                static_cast<unsigned long long>(fingerprint));
  return "nncp_k" + std::to_string(config.k) + "_h" +
         std::to_string(config.hidden_dim) + "_e" +
         std::to_string(config.epochs) + "_s" +
         std::to_string(config.seed) + "_c" + tail + ".ckpt";
}

Seq2SeqModel trained_nncp(const Corpus& train_split, const ModelConfig& config,
                          const std::string& cache_dir,
                          std::vector<double>* losses) {
  std::string cache_path;
  if (!cache_dir.empty()) {
    ensure_dir(cache_dir);
    cache_path = join(
        cache_dir, cache_file_name(config, corpus_fingerprint(train_split)));
    if (fs::exists(cache_path)) {
      try {
        Seq2SeqModel cached = load_checkpoint(cache_path);
        if (config_matches(cached.config, config)) return cached;
      } catch (const std::exception&) {
        // stale or damaged cache entry, retrain below
      }
    }
  }
  TrainResult result = train(config, train_split);
  if (losses) *losses = result.epoch_losses;
  if (!cache_path.empty()) save_checkpoint(result.model, cache_path);
  return result.model;
}

PredictionSet predict_all(const Corpus& train, const Corpus& test,
                          const ExperimentSpec& spec, int k,
                          const std::string& cache_dir) {
  const std::vector<std::string> methods = normalize_methods(spec.methods);
  const bool needs_training_data =
      std::any_of(methods.begin(), methods.end(),
                  [](const std::string& m) { return m != "MEY"; });
  if (needs_training_data && train.records.empty()) {
    throw InsufficientDataError("no training papers in the split");
  }
  if (test.records.empty()) {
    throw InsufficientDataError("no test papers in the split");
  }

  PredictionSet set;
  const std::size_t count = test.records.size();

  for (const std::string& method : methods) {
    if (method == "NNCP") {
      const ModelConfig config = spec.model_config(k);
      set.model = trained_nncp(train, config, cache_dir, &set.nncp_losses);
      set.has_model = true;
      set.by_method[method] = predict_corpus(set.model, test, k);
    } else if (method == "MEY") {
      std::vector<PredictionResult> preds(count);
      parallel_over(count, [&](std::size_t i) {
        preds[i] = mey_predict(test.records[i], k, spec.n);
      });
      set.by_method[method] = std::move(preds);
    } else if (method == "AVR") {
      const NeighborIndex index = NeighborIndex::build(train, k, spec.n);
      FallbackStats stats;
      std::vector<NeighborFallback> kinds(count);
      for (std::size_t i = 0; i < count; ++i) {
        kinds[i] = classify_fallback(index, test.records[i].journal_id,
                                     spec.neighbors);
        if (kinds[i] == NeighborFallback::kFull) ++stats.full;
        if (kinds[i] == NeighborFallback::kReduced) ++stats.reduced;
        if (kinds[i] == NeighborFallback::kMey) ++stats.mey;
      }
      std::vector<PredictionResult> preds(count);
      parallel_over(count, [&](std::size_t i) {
        const CitationRecord& record = test.records[i];
        switch (kinds[i]) {
          case NeighborFallback::kFull:
            preds[i] = avr_predict(index, record, k, spec.n, spec.neighbors);
            break;
          case NeighborFallback::kReduced:
            preds[i] = avr_predict(index, record, k, spec.n,
                                   index.journal_population(record.journal_id));
            break;
          case NeighborFallback::kMey:
            preds[i] = mey_predict(record, k, spec.n);
            break;
        }
      });
      set.fallbacks[method] = stats;
      set.by_method[method] = std::move(preds);
    } else {
      const NeighborIndex index = NeighborIndex::build(train, k, spec.n);
      FallbackStats stats;
      std::vector<NeighborFallback> kinds(count);
      for (std::size_t i = 0; i < count; ++i) {
        kinds[i] = classify_fallback(index, test.records[i].journal_id,
                                     spec.neighbors);
        if (kinds[i] == NeighborFallback::kFull) ++stats.full;
        if (kinds[i] == NeighborFallback::kReduced) ++stats.reduced;
        if (kinds[i] == NeighborFallback::kMey) ++stats.mey;
      }
      std::vector<PredictionResult> preds(count);
      parallel_over(count, [&](std::size_t i) {
        const CitationRecord& record = test.records[i];
        // Per-paper stream keyed by id: prediction order and thread count
        // cannot change any draw.
        Rng rng(mix_seed(spec.seed, fnv1a64(record.paper_id)));
        switch (kinds[i]) {
          case NeighborFallback::kFull:
            preds[i] =
                gmm_predict(index, record, k, spec.n, spec.neighbors, rng);
            break;
          case NeighborFallback::kReduced:
            preds[i] = gmm_predict(index, record, k, spec.n,
                                   index.journal_population(record.journal_id),
                                   rng);
            break;
          case NeighborFallback::kMey:
            preds[i] = mey_predict(record, k, spec.n);
            break;
        }
      });
      set.fallbacks[method] = stats;
      set.by_method[method] = std::move(preds);
    }
  }
  return set;
}

std::vector<std::string> journal_order(const Corpus& test) {
  std::vector<std::string> journals = {"ALL"};
  journals.insert(journals.end(), test.journals.begin(), test.journals.end());
  return journals;
}

std::vector<CitationRecord> journal_subset(const Corpus& test,
                                           const std::string& journal) {
  if (journal == "ALL") return test.records;
  std::vector<CitationRecord> subset;
  for (const CitationRecord& record : test.records) {
    if (record.journal_id == journal) subset.push_back(record);
  }
  return subset;
}

const ScoreCell* find_cell(const EvaluationReport& report,
                           const std::string& journal,
                           const std::string& method,
                           const std::string& mode) {
  for (const ScoreCell& cell : report.cells) {
    if (cell.journal == journal && cell.method == method && cell.mode == mode) {
      return &cell;
    }
  }
  return nullptr;
}

void write_score_grids(const EvaluationReport& report,
                       const std::string& plot_dir,
                       const std::vector<std::string>& modes) {
  std::vector<std::string> journals;
  for (const ScoreCell& cell : report.cells) {
    if (journals.empty() || journals.back() != cell.journal) {
      if (std::find(journals.begin(), journals.end(), cell.journal) ==
          journals.end()) {
        journals.push_back(cell.journal);
      }
    }
  }
  for (const std::string& mode : modes) {
    std::vector<std::vector<double>> rmse_rows, r2_rows;
    for (const std::string& journal : journals) {
      std::vector<double> rmse_row, r2_row;
      for (const std::string& method : report.methods) {
        const ScoreCell* cell = find_cell(report, journal, method, mode);
        rmse_row.push_back(cell ? cell->rmse
                                : std::numeric_limits<double>::quiet_NaN());
        r2_row.push_back(cell && cell->r2_defined
                             ? cell->r2
                             : std::numeric_limits<double>::quiet_NaN());
      }
      rmse_rows.push_back(std::move(rmse_row));
      r2_rows.push_back(std::move(r2_row));
    }
    write_grid_csv(join(plot_dir, "rmse_" + mode + ".csv"), "journal",
                   journals, report.methods, rmse_rows);
    write_grid_csv(join(plot_dir, "r2_" + mode + ".csv"), "journal", journals,
                   report.methods, r2_rows);
  }
}

std::map<std::string, double> parse_journal_mix(const std::string& text) {
  std::map<std::string, double> mix;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    const std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty()) {
      throw ArgumentError("journal mix: empty entry in '" + text + "'");
    }
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos || colon == 0 ||
        colon + 1 >= item.size()) {
      throw ArgumentError("journal mix entry '" + item +
                          "' is not NAME:FRACTION");
    }
    const std::string name = item.substr(0, colon);
    double fraction = 0.0;
    try {
      std::size_t used = 0;
      fraction = std::stod(item.substr(colon + 1), &used);
      if (used != item.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ArgumentError("journal mix entry '" + item +
                          "' has a malformed fraction");
    }
    if (mix.count(name)) {
      throw ArgumentError("journal mix repeats journal " + name);
    }
    mix[name] = fraction;
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (mix.empty()) throw ArgumentError("journal mix: no entries");
  return mix;
}

}  // namespace

ModelConfig ExperimentSpec::model_config(int k_override) const {
  ModelConfig config;
  config.k = k_override;
  config.n = n;
  config.hidden_dim = hidden_dim;
  config.dropout_rate = dropout_rate;
  config.epochs = epochs;
  config.learning_rate = learning_rate;
  config.batch_size = batch_size;
  config.seed = seed;
  return config;
}

const std::vector<std::string>& canonical_methods() {
  static const std::vector<std::string> methods = {"NNCP", "MEY", "AVR",
                                                   "GMM"};
  return methods;
}

std::vector<std::string> normalize_methods(
    const std::vector<std::string>& requested) {
  if (requested.empty()) throw ArgumentError("method list is empty");
  std::vector<std::string> upper;
  for (std::string name : requested) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    const auto& known = canonical_methods();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      throw ArgumentError("unknown method '" + name +
                          "' (valid: NNCP, MEY, AVR, GMM)");
    }
    upper.push_back(name);
  }
  std::vector<std::string> ordered;
  for (const std::string& name : canonical_methods()) {
    if (std::find(upper.begin(), upper.end(), name) != upper.end()) {
      ordered.push_back(name);
    }
  }
  return ordered;
}

EvaluationOutcome evaluate_experiment(const Corpus& corpus,
                                      const ExperimentSpec& spec) {
  if (spec.k < 0 || spec.k >= spec.n) {
    throw ArgumentError("evaluate: need 0 <= k < n");
  }
  SplitSpec years{spec.train_lo, spec.train_hi, spec.test_lo, spec.test_hi};
  SplitResult parts = split(corpus, years);

  PredictionSet set = predict_all(parts.train, parts.test, spec, spec.k, "");

  EvaluationOutcome outcome;
  outcome.report.k = spec.k;
  outcome.report.n = spec.n;
  outcome.report.neighbors = spec.neighbors;
  outcome.report.seed = spec.seed;
  outcome.report.train_lo = spec.train_lo;
  outcome.report.train_hi = spec.train_hi;
  outcome.report.test_lo = spec.test_lo;
  outcome.report.test_hi = spec.test_hi;
  outcome.report.train_papers = parts.train.records.size();
  outcome.report.test_papers = parts.test.records.size();
  outcome.report.dropped_papers = parts.dropped;
  outcome.report.methods = normalize_methods(spec.methods);
  outcome.report.fallbacks = set.fallbacks;
  outcome.nncp_epoch_losses = set.nncp_losses;
  outcome.has_model = set.has_model;
  if (set.has_model) outcome.model = set.model;

  std::vector<std::pair<std::string, EvalMode>> modes = {
      {"total", EvalMode::kTotal}, {"yearly", EvalMode::kYearly}};
  if (spec.yearly_pooled) {
    modes.emplace_back("yearly_pooled", EvalMode::kYearlyPooled);
  }

  for (const std::string& journal : journal_order(parts.test)) {
    const std::vector<CitationRecord> subset =
        journal_subset(parts.test, journal);
    if (subset.empty()) continue;
    for (const std::string& method : outcome.report.methods) {
      const std::vector<ScoredPaper> scored = make_scored(
          subset, set.by_method.at(method), spec.k, spec.n, spec.k + 1);
      for (const auto& [label, mode] : modes) {
        const MethodScore score = evaluate(scored, mode);
        ScoreCell cell;
        cell.journal = journal;
        cell.method = method;
        cell.mode = label;
        cell.rmse = score.rmse;
        cell.r2 = score.r2;
        cell.r2_defined = score.r2_defined;
        cell.papers = score.papers;
        outcome.report.cells.push_back(cell);
      }
    }
  }
  return outcome;
}

Top100Report top100_experiment(const Corpus& corpus,
                               const ExperimentSpec& spec,
                               std::size_t target_rank) {
  if (spec.k < 0 || spec.k >= spec.n) {
    throw ArgumentError("top100: need 0 <= k < n");
  }
  if (target_rank == 0) throw ArgumentError("top100: target rank must be >= 1");
  SplitSpec years{spec.train_lo, spec.train_hi, spec.test_lo, spec.test_hi};
  SplitResult parts = split(corpus, years);
  PredictionSet set = predict_all(parts.train, parts.test, spec, spec.k, "");

  Top100Report report;
  report.k = spec.k;
  report.n = spec.n;
  report.neighbors = spec.neighbors;
  report.seed = spec.seed;
  report.target_rank = target_rank;
  report.methods = normalize_methods(spec.methods);

  // Positions of each method's predictions, aligned with test record order.
  std::map<std::string, const std::vector<PredictionResult>*> preds;
  for (const std::string& method : report.methods) {
    preds[method] = &set.by_method.at(method);
  }

  for (const std::string& journal : parts.test.journals) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < parts.test.records.size(); ++i) {
      if (parts.test.records[i].journal_id == journal) indices.push_back(i);
    }
    if (indices.empty()) {
      std::cerr << "warning: journal " << journal
                << " has no test papers, skipped\n";
      continue;
    }
    auto total_citations = [&](std::size_t idx) {
      long total = 0;
      for (long c : parts.test.records[idx].citations) total += c;
      return total;
    };
    std::sort(indices.begin(), indices.end(),
              [&](std::size_t a, std::size_t b) {
                const long ta = total_citations(a);
                const long tb = total_citations(b);
                if (ta != tb) return ta > tb;
                return parts.test.records[a].paper_id <
                       parts.test.records[b].paper_id;
              });
    const std::size_t ranked = std::min(target_rank, indices.size());

    JournalRanking ranking;
    ranking.journal = journal;
    ranking.population = indices.size();
    ranking.ranked = ranked;
    for (const std::string& method : report.methods) {
      ranking.credit[method] = 0.0;
    }

    for (std::size_t r = 0; r < ranked; ++r) {
      const CitationRecord& record = parts.test.records[indices[r]];
      std::vector<double> actual;
      for (int year = spec.k + 1; year <= spec.n; ++year) {
        actual.push_back(static_cast<double>(
            record.citations[static_cast<std::size_t>(year)]));
      }
      std::vector<std::pair<std::string, double>> errors;
      for (const std::string& method : report.methods) {
        errors.emplace_back(
            method, rmse(actual, (*preds[method])[indices[r]].yearly));
      }
      double best = errors.front().second;
      for (const auto& [method, value] : errors) best = std::min(best, value);
      std::vector<std::string> winners;
      for (const auto& [method, value] : errors) {
        if (value == best) winners.push_back(method);
      }
      for (const std::string& method : winners) {
        ranking.credit[method] += 1.0 / static_cast<double>(winners.size());
      }
    }
    report.rankings.push_back(std::move(ranking));
  }
  return report;
}

SensitivityReport sensitivity_experiment(const Corpus& corpus,
                                         const ExperimentSpec& spec,
                                         const std::string& cache_dir) {
  if (spec.n < 8) {
    throw ArgumentError("sensitivity: needs n >= 8 for the fixed window");
  }
  SplitSpec years{spec.train_lo, spec.train_hi, spec.test_lo, spec.test_hi};
  SplitResult parts = split(corpus, years);

  SensitivityReport report;
  report.n = spec.n;
  report.neighbors = spec.neighbors;
  report.seed = spec.seed;
  report.window_lo = 7;
  report.window_hi = spec.n;
  report.mode = "total";
  report.methods = normalize_methods(spec.methods);

  for (int k = 0; k <= 7; ++k) {
    PredictionSet set = predict_all(parts.train, parts.test, spec, k,
                                    cache_dir);
    SensitivityPoint point;
    point.k = k;
    const int first_year = std::max(7, k + 1);
    for (const std::string& method : report.methods) {
      const std::vector<ScoredPaper> scored =
          make_scored(parts.test.records, set.by_method.at(method), k, spec.n,
                      first_year);
      point.by_method[method] = evaluate(scored, EvalMode::kTotal);
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

void run_evaluate(const ExperimentSpec& spec) {
  const Corpus corpus = load_corpus(spec.corpus_path, spec.n);
  const EvaluationOutcome outcome = evaluate_experiment(corpus, spec);
  ensure_dir(spec.out_dir);
  const std::string plot_dir = join(spec.out_dir, "plotdata");
  ensure_dir(plot_dir);
  write_evaluation_report(outcome.report, join(spec.out_dir, "report.json"),
                          join(spec.out_dir, "report.txt"));
  std::vector<std::string> modes = {"total", "yearly"};
  if (spec.yearly_pooled) modes.push_back("yearly_pooled");
  write_score_grids(outcome.report, plot_dir, modes);
  if (outcome.has_model) {
    save_checkpoint(outcome.model, join(spec.out_dir, "model.ckpt"));
    write_losses_csv(join(spec.out_dir, "losses.csv"),
                     outcome.nncp_epoch_losses);
  }
}

void run_train(const ExperimentSpec& spec) {
  const Corpus corpus = load_corpus(spec.corpus_path, spec.n);
  SplitSpec years{spec.train_lo, spec.train_hi, spec.test_lo, spec.test_hi};
  SplitResult parts = split(corpus, years);
  if (parts.train.records.empty()) {
    throw InsufficientDataError("no training papers in the split");
  }
  const ModelConfig config = spec.model_config(spec.k);
  const TrainResult result = train(config, parts.train);
  ensure_dir(spec.out_dir);
  const std::string ckpt = join(spec.out_dir, "model.ckpt");
  save_checkpoint(result.model, ckpt);
  write_losses_csv(join(spec.out_dir, "losses.csv"), result.epoch_losses);

  TrainReport report;
  report.config = config;
  report.train_papers = parts.train.records.size();
  report.dropped_papers = corpus.records.size() - parts.train.records.size();
  report.parameter_count = result.model.parameter_count();
  report.epoch_losses = result.epoch_losses;
  report.checkpoint_path = ckpt;
  write_train_report(report, join(spec.out_dir, "report.json"),
                     join(spec.out_dir, "report.txt"));
}

void run_predict(const ExperimentSpec& spec) {
  if (spec.model_path.empty()) {
    throw ArgumentError("predict: --model is required");
  }
  const Seq2SeqModel model = load_checkpoint(spec.model_path);
  const Corpus corpus = load_corpus(spec.corpus_path, spec.n);
  if (model.config.k >= spec.n + 1) {
    throw ArgumentError("predict: model needs " +
                        std::to_string(model.config.k + 1) +
                        " observed years, corpus horizon is " +
                        std::to_string(spec.n));
  }
  const std::vector<PredictionResult> predictions =
      predict_corpus(model, corpus, model.config.k);
  ensure_dir(spec.out_dir);
  const std::string csv = join(spec.out_dir, "predictions.csv");
  write_predictions_csv(csv, predictions, corpus, model.config.k,
                        model.config.n);

  PredictReport report;
  report.k = model.config.k;
  report.n = model.config.n;
  report.hidden_dim = model.config.hidden_dim;
  report.papers = corpus.records.size();
  report.model_path = spec.model_path;
  report.predictions_path = csv;
  write_predict_report(report, join(spec.out_dir, "report.json"),
                       join(spec.out_dir, "report.txt"));
}

void run_top100(const ExperimentSpec& spec) {
  const Corpus corpus = load_corpus(spec.corpus_path, spec.n);
  const Top100Report report = top100_experiment(corpus, spec, 100);
  ensure_dir(spec.out_dir);
  const std::string plot_dir = join(spec.out_dir, "plotdata");
  ensure_dir(plot_dir);
  write_top100_report(report, join(spec.out_dir, "report.json"),
                      join(spec.out_dir, "report.txt"));
  std::vector<std::string> journals;
  std::vector<std::vector<double>> rows;
  for (const JournalRanking& ranking : report.rankings) {
    journals.push_back(ranking.journal);
    std::vector<double> row;
    for (const std::string& method : report.methods) {
      auto it = ranking.credit.find(method);
      row.push_back(it == ranking.credit.end() ? 0.0 : it->second);
    }
    rows.push_back(std::move(row));
  }
  write_grid_csv(join(plot_dir, "top100_frequency.csv"), "journal", journals,
                 report.methods, rows);
}

void run_sensitivity(const ExperimentSpec& spec) {
  const Corpus corpus = load_corpus(spec.corpus_path, spec.n);
  const SensitivityReport report =
      sensitivity_experiment(corpus, spec, join(spec.out_dir, "cache"));
  ensure_dir(spec.out_dir);
  const std::string plot_dir = join(spec.out_dir, "plotdata");
  ensure_dir(plot_dir);
  write_sensitivity_report(report, join(spec.out_dir, "report.json"),
                           join(spec.out_dir, "report.txt"));
  std::vector<std::string> ks;
  std::vector<std::vector<double>> rmse_rows, r2_rows;
  for (const SensitivityPoint& point : report.points) {
    ks.push_back(std::to_string(point.k));
    std::vector<double> rmse_row, r2_row;
    for (const std::string& method : report.methods) {
      auto it = point.by_method.find(method);
      if (it == point.by_method.end()) {
        rmse_row.push_back(std::numeric_limits<double>::quiet_NaN());
        r2_row.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        rmse_row.push_back(it->second.rmse);
        r2_row.push_back(it->second.r2_defined
                             ? it->second.r2
                             : std::numeric_limits<double>::quiet_NaN());
      }
    }
    rmse_rows.push_back(std::move(rmse_row));
    r2_rows.push_back(std::move(r2_row));
  }
  write_grid_csv(join(plot_dir, "sensitivity_rmse.csv"), "k", ks,
                 report.methods, rmse_rows);
  write_grid_csv(join(plot_dir, "sensitivity_r2.csv"), "k", ks,
                 report.methods, r2_rows);
}

SynthReport run_synth(const ExperimentSpec& spec) {
  SyntheticOptions options;
  options.n_papers = spec.synth_papers;
  options.horizon_n = spec.n;
  if (!spec.journal_mix.empty()) {
    options.journal_mix = parse_journal_mix(spec.journal_mix);
  }
  Rng rng(spec.seed);
  const Corpus corpus = generate_synthetic(rng, options);
  ensure_dir(spec.out_dir);
  const std::string path = join(spec.out_dir, "corpus.csv");
  write_corpus(corpus, path);

  SynthReport report;
  report.papers = corpus.records.size();
  report.seed = spec.seed;
  report.horizon_n = spec.n;
  double total = 0.0;
  for (const CitationRecord& record : corpus.records) {
    ++report.journal_counts[record.journal_id];
    for (long c : record.citations) total += static_cast<double>(c);
  }
  report.mean_total_citations =
      corpus.records.empty() ? 0.0
                             : total / static_cast<double>(corpus.records.size());
  report.corpus_path = path;
  write_synth_report(report, join(spec.out_dir, "report.json"),
                     join(spec.out_dir, "report.txt"));
  return report;
}

}  // namespace nncp
