#include "nncp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "nncp/errors.hpp"

namespace nncp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fixed(double value, int decimals) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
  return buffer;
}

std::string r2_text(double value, bool defined) {
  return defined ? fixed(value, 4) : std::string("undef");
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << body;
  if (!out.flush()) throw IoError("failed writing " + path);
}

void write_json_file(const std::string& path, const ordered_json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << doc.dump(2) << '\n';
  if (!out.flush()) throw IoError("failed writing " + path);
}

// Left-aligned fixed-width table renderer for the .txt reports.
class Table {
 public:
  explicit Table(std::vector<std::string> header)
      : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    rows_.push_back(std::move(cells));
  }

  std::string render() const {
    std::vector<std::size_t> widths(header_.size(), 0);
    auto widen = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        widths[i] = std::max(widths[i], cells[i].size());
      }
    };
    widen(header_);
    for (const auto& row : rows_) widen(row);

    std::string out;
    auto emit = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out += cells[i];
        if (i + 1 < cells.size()) {
          out.append(widths[i] - cells[i].size() + 2, ' ');
        }
      }
      out += '\n';
    };
    emit(header_);
    std::string rule;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      rule.append(widths[i], '-');
      if (i + 1 < widths.size()) rule.append(2, ' ');
    }
    out += rule + '\n';
    for (const auto& row : rows_) emit(row);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

ordered_json score_json(double rmse_value, double r2_value, bool defined,
                        std::size_t papers) {
  ordered_json cell;
  cell["papers"] = papers;
  cell["rmse"] = rmse_value;
  if (defined) {
    cell["r2"] = r2_value;
  } else {
    cell["r2"] = nullptr;
  }
  cell["r2_defined"] = defined;
  return cell;
}

ordered_json fallback_json(const FallbackStats& stats) {
  ordered_json node;
  node["full"] = stats.full;
  node["reduced"] = stats.reduced;
  node["mey"] = stats.mey;
  return node;
}

}  // namespace

void write_evaluation_report(const EvaluationReport& report,
                             const std::string& json_path,
                             const std::string& txt_path) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = "evaluate";
  doc["k"] = report.k;
  doc["n"] = report.n;
  doc["neighbors"] = report.neighbors;
  doc["seed"] = report.seed;
  doc["train_years"] = {{"lo", report.train_lo}, {"hi", report.train_hi}};
  doc["test_years"] = {{"lo", report.test_lo}, {"hi", report.test_hi}};
  doc["papers"] = {{"train", report.train_papers},
                   {"test", report.test_papers},
                   {"dropped", report.dropped_papers}};
  doc["methods"] = report.methods;
  ordered_json fallbacks = ordered_json::object();
  for (const std::string& method : report.methods) {
    auto it = report.fallbacks.find(method);
    if (it != report.fallbacks.end()) {
      fallbacks[method] = fallback_json(it->second);
    }
  }
  doc["fallbacks"] = fallbacks;
  ordered_json scores = ordered_json::array();
  for (const ScoreCell& cell : report.cells) {
    ordered_json row;
    row["journal"] = cell.journal;
    row["method"] = cell.method;
    row["mode"] = cell.mode;
    ordered_json body = score_json(cell.rmse, cell.r2, cell.r2_defined,
                                   cell.papers);
    for (auto& [key, value] : body.items()) row[key] = value;
    scores.push_back(row);
  }
  doc["scores"] = scores;
  write_json_file(json_path, doc);

  std::string text = "Citation forecast evaluation (schema " +
                     std::to_string(kReportSchemaVersion) + ")\n";
  text += "k=" + std::to_string(report.k) + "  n=" + std::to_string(report.n) +
          "  neighbors=" + std::to_string(report.neighbors) + "  seed=" +
          std::to_string(report.seed) + "\n";
  text += "train years " + std::to_string(report.train_lo) + "-" +
          std::to_string(report.train_hi) + " (" +
          std::to_string(report.train_papers) + " papers), test years " +
          std::to_string(report.test_lo) + "-" +
          std::to_string(report.test_hi) + " (" +
          std::to_string(report.test_papers) + " papers), dropped " +
          std::to_string(report.dropped_papers) + "\n\n";
  Table table({"Journal", "Method", "Mode", "Papers", "RMSE", "R2"});
  for (const ScoreCell& cell : report.cells) {
    table.add_row({cell.journal, cell.method, cell.mode,
                   std::to_string(cell.papers), fixed(cell.rmse, 4),
                   r2_text(cell.r2, cell.r2_defined)});
  }
  text += table.render();
  bool first = true;
  for (const std::string& method : report.methods) {
    auto it = report.fallbacks.find(method);
    if (it == report.fallbacks.end()) continue;
    text += first ? "\nFallbacks: " : "; ";
    first = false;
    text += method + " full=" + std::to_string(it->second.full) +
            " reduced=" + std::to_string(it->second.reduced) +
            " mey=" + std::to_string(it->second.mey);
  }
  if (!first) text += "\n";
  write_text_file(txt_path, text);
}

void write_top100_report(const Top100Report& report,
                         const std::string& json_path,
                         const std::string& txt_path) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = "top100";
  doc["k"] = report.k;
  doc["n"] = report.n;
  doc["neighbors"] = report.neighbors;
  doc["seed"] = report.seed;
  doc["target_rank"] = report.target_rank;
  doc["methods"] = report.methods;
  ordered_json journals = ordered_json::array();
  for (const JournalRanking& ranking : report.rankings) {
    ordered_json row;
    row["journal"] = ranking.journal;
    row["population"] = ranking.population;
    row["ranked"] = ranking.ranked;
    ordered_json credit = ordered_json::object();
    for (const std::string& method : report.methods) {
      auto it = ranking.credit.find(method);
      credit[method] = it == ranking.credit.end() ? 0.0 : it->second;
    }
    row["credit"] = credit;
    journals.push_back(row);
  }
  doc["journals"] = journals;
  write_json_file(json_path, doc);

  std::string text = "Best-prediction frequency among each journal's most cited papers (schema " +
                     std::to_string(kReportSchemaVersion) + ")\n";
  text += "k=" + std::to_string(report.k) + "  n=" + std::to_string(report.n) +
          "  neighbors=" + std::to_string(report.neighbors) + "  seed=" +
          std::to_string(report.seed) + "  target_rank=" +
          std::to_string(report.target_rank) + "\n\n";
  std::vector<std::string> header = {"Journal", "Population", "Ranked"};
  for (const std::string& method : report.methods) header.push_back(method);
  Table table(header);
  for (const JournalRanking& ranking : report.rankings) {
    std::vector<std::string> row = {ranking.journal,
                                    std::to_string(ranking.population),
                                    std::to_string(ranking.ranked)};
    for (const std::string& method : report.methods) {
      auto it = ranking.credit.find(method);
      row.push_back(fixed(it == ranking.credit.end() ? 0.0 : it->second, 2));
    }
    table.add_row(row);
  }
  text += table.render();
  write_text_file(txt_path, text);
}

void write_sensitivity_report(const SensitivityReport& report,
                              const std::string& json_path,
                              const std::string& txt_path) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = "sensitivity";
  doc["n"] = report.n;
  doc["neighbors"] = report.neighbors;
  doc["seed"] = report.seed;
  doc["window"] = {{"lo", report.window_lo}, {"hi", report.window_hi}};
  doc["mode"] = report.mode;
  doc["methods"] = report.methods;
  ordered_json points = ordered_json::array();
  for (const SensitivityPoint& point : report.points) {
    ordered_json row;
    row["k"] = point.k;
    ordered_json scores = ordered_json::object();
    for (const std::string& method : report.methods) {
      auto it = point.by_method.find(method);
      if (it == point.by_method.end()) continue;
      scores[method] = score_json(it->second.rmse, it->second.r2,
                                  it->second.r2_defined, it->second.papers);
    }
    row["scores"] = scores;
    points.push_back(row);
  }
  doc["points"] = points;
  write_json_file(json_path, doc);

  std::string text = "Known-prefix sensitivity sweep (schema " +
                     std::to_string(kReportSchemaVersion) + ")\n";
  text += "window years " + std::to_string(report.window_lo) + ".." +
          std::to_string(report.window_hi) + " (" + report.mode +
          " mode), neighbors=" + std::to_string(report.neighbors) +
          ", seed=" + std::to_string(report.seed) + "\n\n";
  std::vector<std::string> header = {"k"};
  for (const std::string& method : report.methods) {
    header.push_back(method + " RMSE");
    header.push_back(method + " R2");
  }
  Table table(header);
  for (const SensitivityPoint& point : report.points) {
    std::vector<std::string> row = {std::to_string(point.k)};
    for (const std::string& method : report.methods) {
      auto it = point.by_method.find(method);
      if (it == point.by_method.end()) {
        row.push_back("-");
        row.push_back("-");
      } else {
        row.push_back(fixed(it->second.rmse, 4));
        row.push_back(r2_text(it->second.r2, it->second.r2_defined));
      }
    }
    table.add_row(row);
  }
  text += table.render();
  write_text_file(txt_path, text);
}

void write_train_report(const TrainReport& report,
                        const std::string& json_path,
                        const std::string& txt_path) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = "train";
  ordered_json config;
  config["k"] = report.config.k;
  config["n"] = report.config.n;
  config["hidden_dim"] = report.config.hidden_dim;
  config["dropout_rate"] = report.config.dropout_rate;
  config["epochs"] = report.config.epochs;
  config["learning_rate"] = report.config.learning_rate;
  config["batch_size"] = report.config.batch_size;
  config["seed"] = report.config.seed;
  doc["config"] = config;
  doc["papers"] = {{"train", report.train_papers},
                   {"dropped", report.dropped_papers}};
  doc["parameter_count"] = report.parameter_count;
  doc["first_epoch_loss"] = report.epoch_losses.empty()
                                ? ordered_json(nullptr)
                                : ordered_json(report.epoch_losses.front());
  doc["final_epoch_loss"] = report.epoch_losses.empty()
                                ? ordered_json(nullptr)
                                : ordered_json(report.epoch_losses.back());
  doc["checkpoint"] = report.checkpoint_path;
  write_json_file(json_path, doc);

  std::string text = "Model training summary (schema " +
                     std::to_string(kReportSchemaVersion) + ")\n";
  text += "k=" + std::to_string(report.config.k) + "  n=" +
          std::to_string(report.config.n) + "  hidden=" +
          std::to_string(report.config.hidden_dim) + "  epochs=" +
          std::to_string(report.config.epochs) + "  batch=" +
          std::to_string(report.config.batch_size) + "  lr=" +
          fixed(report.config.learning_rate, 8) + "  dropout=" +
          fixed(report.config.dropout_rate, 2) + "  seed=" +
          std::to_string(report.config.seed) + "\n";
  text += "parameters: " + std::to_string(report.parameter_count) + "\n";
  text += "train papers: " + std::to_string(report.train_papers) +
          " (dropped " + std::to_string(report.dropped_papers) + ")\n";
  if (!report.epoch_losses.empty()) {
    text += "loss: first epoch " + fixed(report.epoch_losses.front(), 4) +
            ", final epoch " + fixed(report.epoch_losses.back(), 4) + "\n";
  }
  text += "checkpoint: " + report.checkpoint_path + "\n";
  write_text_file(txt_path, text);
}

void write_predict_report(const PredictReport& report,
                          const std::string& json_path,
                          const std::string& txt_path) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = "predict";
  doc["k"] = report.k;
  doc["n"] = report.n;
  doc["hidden_dim"] = report.hidden_dim;
  doc["papers"] = report.papers;
  doc["model"] = report.model_path;
  doc["predictions"] = report.predictions_path;
  write_json_file(json_path, doc);

  std::string text = "Prediction run (schema " +
                     std::to_string(kReportSchemaVersion) + ")\n";
  text += "model " + report.model_path + " (k=" + std::to_string(report.k) +
          ", n=" + std::to_string(report.n) + ", hidden=" +
          std::to_string(report.hidden_dim) + ")\n";
  text += std::to_string(report.papers) + " papers -> " +
          report.predictions_path + "\n";
  write_text_file(txt_path, text);
}

void write_synth_report(const SynthReport& report,
                        const std::string& json_path,
                        const std::string& txt_path) {
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = "synth";
  doc["papers"] = report.papers;
  doc["seed"] = report.seed;
  doc["horizon_n"] = report.horizon_n;
  ordered_json journals = ordered_json::object();
  for (const auto& [journal, count] : report.journal_counts) {
    journals[journal] = count;
  }
  doc["journal_counts"] = journals;
  doc["mean_total_citations"] = report.mean_total_citations;
  doc["corpus"] = report.corpus_path;
  write_json_file(json_path, doc);

  std::string text = "Synthetic corpus summary (schema " +
                     std::to_string(kReportSchemaVersion) + ")\n";
  text += std::to_string(report.papers) + " papers, horizon n=" +
          std::to_string(report.horizon_n) + ", seed " +
          std::to_string(report.seed) + "\n";
  Table table({"Journal", "Papers"});
  for (const auto& [journal, count] : report.journal_counts) {
    table.add_row({journal, std::to_string(count)});
  }
  text += table.render();
  text += "mean total citations per paper: " +
          fixed(report.mean_total_citations, 4) + "\n";
  text += "corpus: " + report.corpus_path + "\n";
  write_text_file(txt_path, text);
}

void write_grid_csv(const std::string& path, const std::string& row_header,
                    const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels,
                    const std::vector<std::vector<double>>& values) {
  if (values.size() != row_labels.size()) {
    throw ArgumentError("grid csv: row count mismatch");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << row_header;
  for (const std::string& col : col_labels) out << ',' << col;
  out << '\n';
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    if (values[r].size() != col_labels.size()) {
      throw ArgumentError("grid csv: column count mismatch");
    }
    out << row_labels[r];
    for (double v : values[r]) {
      out << ',';
      if (!std::isnan(v)) out << fixed(v, 6);
    }
    out << '\n';
  }
  if (!out.flush()) throw IoError("failed writing " + path);
}

void write_losses_csv(const std::string& path,
                      const std::vector<double>& epoch_losses) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "epoch,loss\n";
  for (std::size_t e = 0; e < epoch_losses.size(); ++e) {
    out << e << ',' << fixed(epoch_losses[e], 8) << '\n';
  }
  if (!out.flush()) throw IoError("failed writing " + path);
}

void write_predictions_csv(const std::string& path,
                           const std::vector<PredictionResult>& predictions,
                           const Corpus& corpus, int k, int n) {
  if (predictions.size() != corpus.records.size()) {
    throw ArgumentError("predictions csv: size mismatch");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "paper_id,journal_id";
  for (int year = k + 1; year <= n; ++year) out << ",pred_c" << year;
  out << ",total\n";
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const PredictionResult& p = predictions[i];
    out << p.paper_id << ',' << corpus.records[i].journal_id;
    for (double v : p.yearly) out << ',' << fixed(v, 6);
    out << ',' << fixed(p.total, 6) << '\n';
  }
  if (!out.flush()) throw IoError("failed writing " + path);
}

}  // namespace nncp
