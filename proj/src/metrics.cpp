#include "nncp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "nncp/errors.hpp"

namespace nncp {

namespace {

constexpr double kUndefined = -std::numeric_limits<double>::infinity();

void check_same_length(std::span<const double> a, std::span<const double> b,
                       const char* what) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": lengths " +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

// r2 without the minimum-length exception; degenerate inputs become the
// undefined sentinel so aggregate paths never throw mid-report.
double r2_or_sentinel(std::span<const double> actual,
                      std::span<const double> predicted) {
  if (actual.size() < 2) return kUndefined;
  return r2(actual, predicted);
}

}  // namespace

double rmse(std::span<const double> actual,
            std::span<const double> predicted) {
  check_same_length(actual, predicted, "rmse");
  if (actual.empty()) throw ArgumentError("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = actual[i] - predicted[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(actual.size()));
}

double r2(std::span<const double> actual, std::span<const double> predicted) {
  check_same_length(actual, predicted, "r2");
  if (actual.size() < 2) throw ArgumentError("r2: need at least 2 samples");
  double mean = 0.0;
  for (double v : actual) mean += v;
  mean /= static_cast<double>(actual.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double res = actual[i] - predicted[i];
    const double dev = actual[i] - mean;
    ss_res += res * res;
    ss_tot += dev * dev;
  }
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : kUndefined;
  return 1.0 - ss_res / ss_tot;
}

bool r2_defined(double value) { return value != kUndefined; }

std::string mode_label(EvalMode mode) {
  switch (mode) {
    case EvalMode::kTotal:
      return "total";
    case EvalMode::kYearly:
      return "yearly";
    case EvalMode::kYearlyPooled:
      return "yearly_pooled";
  }
  throw ArgumentError("unknown evaluation mode");
}

std::vector<ScoredPaper> make_scored(std::span<const CitationRecord> records,
                                     std::span<const PredictionResult> preds,
                                     int k, int n, int first_year) {
  if (first_year < k + 1 || first_year > n) {
    throw ArgumentError("make_scored: first_year must be in [k+1, n]");
  }
  std::map<std::string, const PredictionResult*> by_id;
  for (const PredictionResult& p : preds) by_id[p.paper_id] = &p;

  const std::size_t want_len = static_cast<std::size_t>(n - k);
  const std::size_t skip = static_cast<std::size_t>(first_year - (k + 1));
  std::vector<ScoredPaper> out;
  out.reserve(records.size());
  for (const CitationRecord& record : records) {
    auto it = by_id.find(record.paper_id);
    if (it == by_id.end()) {
      throw ArgumentError("no prediction for paper " + record.paper_id);
    }
    if (it->second->yearly.size() != want_len) {
      throw ShapeError("prediction for " + record.paper_id + " has " +
                       std::to_string(it->second->yearly.size()) +
                       " years, expected " + std::to_string(want_len));
    }
    if (record.citations.size() < static_cast<std::size_t>(n) + 1) {
      throw ArgumentError("record " + record.paper_id +
                          " too short for horizon " + std::to_string(n));
    }
    ScoredPaper scored;
    scored.paper_id = record.paper_id;
    for (int year = first_year; year <= n; ++year) {
      scored.actual.push_back(
          static_cast<double>(record.citations[static_cast<std::size_t>(year)]));
      scored.predicted.push_back(
          it->second->yearly[skip + static_cast<std::size_t>(year - first_year)]);
    }
    out.push_back(std::move(scored));
  }
  return out;
}

MethodScore evaluate(std::span<const ScoredPaper> papers, EvalMode mode) {
  if (papers.empty()) throw ArgumentError("evaluate: no papers");
  const std::size_t years = papers.front().actual.size();
  for (const ScoredPaper& p : papers) {
    if (p.actual.size() != years || p.predicted.size() != years) {
      throw ShapeError("evaluate: ragged scored papers");
    }
  }
  if (years == 0) throw ArgumentError("evaluate: empty scoring window");

  std::vector<const ScoredPaper*> sorted;
  sorted.reserve(papers.size());
  for (const ScoredPaper& p : papers) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredPaper* a, const ScoredPaper* b) {
              return a->paper_id < b->paper_id;
            });

  MethodScore score;
  score.papers = papers.size();

  if (mode == EvalMode::kTotal) {
    std::vector<double> actual_total, predicted_total;
    actual_total.reserve(sorted.size());
    predicted_total.reserve(sorted.size());
    for (const ScoredPaper* p : sorted) {
      double c = 0.0;
      double c_hat = 0.0;
      for (std::size_t i = 0; i < years; ++i) {
        c += p->actual[i];
        c_hat += p->predicted[i];
      }
      actual_total.push_back(c);
      predicted_total.push_back(c_hat);
    }
    score.rmse = rmse(actual_total, predicted_total);
    score.r2 = r2_or_sentinel(actual_total, predicted_total);
  } else if (mode == EvalMode::kYearly) {
    double rmse_sum = 0.0;
    double r2_sum = 0.0;
    std::size_t r2_years = 0;
    std::vector<double> actual_year(sorted.size());
    std::vector<double> predicted_year(sorted.size());
    for (std::size_t y = 0; y < years; ++y) {
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        actual_year[i] = sorted[i]->actual[y];
        predicted_year[i] = sorted[i]->predicted[y];
      }
      rmse_sum += rmse(actual_year, predicted_year);
      const double year_r2 = r2_or_sentinel(actual_year, predicted_year);
      if (r2_defined(year_r2)) {
        r2_sum += year_r2;
        ++r2_years;
      }
    }
    score.rmse = rmse_sum / static_cast<double>(years);
    score.r2 = r2_years > 0 ? r2_sum / static_cast<double>(r2_years)
                            : -std::numeric_limits<double>::infinity();
  } else {
    std::vector<double> actual_flat, predicted_flat;
    actual_flat.reserve(sorted.size() * years);
    predicted_flat.reserve(sorted.size() * years);
    for (const ScoredPaper* p : sorted) {
      actual_flat.insert(actual_flat.end(), p->actual.begin(),
                         p->actual.end());
      predicted_flat.insert(predicted_flat.end(), p->predicted.begin(),
                            p->predicted.end());
    }
    score.rmse = rmse(actual_flat, predicted_flat);
    score.r2 = r2_or_sentinel(actual_flat, predicted_flat);
  }

  score.r2_defined = r2_defined(score.r2);
  return score;
}

}  // namespace nncp
