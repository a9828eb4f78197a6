#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nncp/baselines.hpp"
#include "nncp/metrics.hpp"
#include "nncp/model.hpp"

namespace nncp {

inline constexpr int kReportSchemaVersion = 1;

/// One scored (journal, method, mode) combination. journal "ALL" pools the
/// whole test split.
struct ScoreCell {
  std::string journal;
  std::string method;
  std::string mode;
  double rmse = 0.0;
  double r2 = 0.0;
  bool r2_defined = false;
  std::size_t papers = 0;
};

struct EvaluationReport {
  int k = 0;
  int n = 0;
  std::size_t neighbors = 0;
  std::uint64_t seed = 0;
  int train_lo = 0, train_hi = 0;
  int test_lo = 0, test_hi = 0;
  std::size_t train_papers = 0;
  std::size_t test_papers = 0;
  std::size_t dropped_papers = 0;
  std::vector<std::string> methods;
  std::map<std::string, FallbackStats> fallbacks;
  std::vector<ScoreCell> cells;
};

struct JournalRanking {
  std::string journal;
  std::size_t population = 0;
  std::size_t ranked = 0;
  // Best-prediction credit per method; ties split fractionally, so the
  // values sum to `ranked`.
  std::map<std::string, double> credit;
};

struct Top100Report {
  int k = 0;
  int n = 0;
  std::size_t neighbors = 0;
  std::uint64_t seed = 0;
  std::size_t target_rank = 100;
  std::vector<std::string> methods;
  std::vector<JournalRanking> rankings;
};

struct SensitivityPoint {
  int k = 0;
  std::map<std::string, MethodScore> by_method;
};

struct SensitivityReport {
  int n = 0;
  std::size_t neighbors = 0;
  std::uint64_t seed = 0;
  int window_lo = 7;
  int window_hi = 14;
  std::string mode = "total";
  std::vector<std::string> methods;
  std::vector<SensitivityPoint> points;
};

struct TrainReport {
  ModelConfig config;
  std::size_t train_papers = 0;
  std::size_t dropped_papers = 0;
  std::size_t parameter_count = 0;
  std::vector<double> epoch_losses;
  std::string checkpoint_path;
};

struct PredictReport {
  int k = 0;
  int n = 0;
  int hidden_dim = 0;
  std::size_t papers = 0;
  std::string model_path;
  std::string predictions_path;
};

struct SynthReport {
  std::size_t papers = 0;
  std::uint64_t seed = 0;
  int horizon_n = 14;
  std::map<std::string, std::size_t> journal_counts;
  double mean_total_citations = 0.0;
  std::string corpus_path;
};

// Writers. JSON output is fully ordered and carries no timestamps or
// machine identifiers, so identical inputs produce identical bytes.

void write_evaluation_report(const EvaluationReport& report,
                             const std::string& json_path,
                             const std::string& txt_path);

void write_top100_report(const Top100Report& report,
                         const std::string& json_path,
                         const std::string& txt_path);

void write_sensitivity_report(const SensitivityReport& report,
                              const std::string& json_path,
                              const std::string& txt_path);

void write_train_report(const TrainReport& report,
                        const std::string& json_path,
                        const std::string& txt_path);

void write_predict_report(const PredictReport& report,
                          const std::string& json_path,
                          const std::string& txt_path);

void write_synth_report(const SynthReport& report,
                        const std::string& json_path,
                        const std::string& txt_path);

/// Grid CSV: header `row_header,col...`, one row per label. Cells hold
/// 6-decimal fixed-point values; absent cells (NaN) stay empty.
void write_grid_csv(const std::string& path, const std::string& row_header,
                    const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels,
                    const std::vector<std::vector<double>>& values);

void write_losses_csv(const std::string& path,
                      const std::vector<double>& epoch_losses);

void write_predictions_csv(const std::string& path,
                           const std::vector<PredictionResult>& predictions,
                           const Corpus& corpus, int k, int n);

}  // namespace nncp
