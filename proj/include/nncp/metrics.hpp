#pragma once

#include <span>
#include <string>
#include <vector>

#include "nncp/dataset.hpp"
#include "nncp/model.hpp"

namespace nncp {

/// Root mean squared error. Throws ShapeError on length mismatch and
/// ArgumentError on empty input.
double rmse(std::span<const double> actual, std::span<const double> predicted);

/// Coefficient of determination, 1 - SS_res/SS_tot. When every actual value
/// is equal (SS_tot = 0) the score is 1 for a perfect fit and otherwise the
/// negative-infinity sentinel that reports flag as undefined. Throws
/// ShapeError on length mismatch, ArgumentError when fewer than 2 samples.
double r2(std::span<const double> actual, std::span<const double> predicted);

/// True unless value is the undefined sentinel.
bool r2_defined(double value);

/// total: score the per-paper sums C vs the predicted totals.
/// yearly: score each year across papers, then average the per-year scores
/// uniformly (undefined years are left out of the R^2 average).
/// yearly_pooled: pool all paper-year pairs into one flat comparison.
enum class EvalMode { kTotal, kYearly, kYearlyPooled };

std::string mode_label(EvalMode mode);

/// One paper's actual and predicted citations over the scored years, index
/// aligned (entry i is year first_year + i).
struct ScoredPaper {
  std::string paper_id;
  std::vector<double> actual;
  std::vector<double> predicted;
};

struct MethodScore {
  double rmse = 0.0;
  double r2 = 0.0;
  bool r2_defined = false;
  std::size_t papers = 0;
};

/// Aligns records with a method's predictions (matched by paper_id) and
/// slices out years first_year..n. Predictions carry years k+1..n, so
/// first_year must be at least k+1; the sensitivity sweep passes a later
/// start to keep its scoring window fixed across k. Throws ArgumentError
/// when a record has no prediction.
std::vector<ScoredPaper> make_scored(std::span<const CitationRecord> records,
                                     std::span<const PredictionResult> preds,
                                     int k, int n, int first_year);

/// Scores a set of papers in the requested mode. Papers are re-sorted by
/// paper_id internally so the result is independent of input order. Cases
/// where R^2 has no meaning (fewer than 2 samples, zero variance with
/// nonzero residual) come back as the undefined sentinel, not an error.
MethodScore evaluate(std::span<const ScoredPaper> papers, EvalMode mode);

}  // namespace nncp
