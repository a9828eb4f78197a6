#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nncp/dataset.hpp"
#include "nncp/gmm.hpp"
#include "nncp/model.hpp"
#include "nncp/rng.hpp"

namespace nncp {

/// One training paper as the neighbor search sees it: the early segment
/// c_0..c_k that queries are matched against, and the future segment
/// c_{k+1}..c_n that predictions are built from.
struct NeighborEntry {
  std::string paper_id;
  std::vector<double> early;
  std::vector<double> future;
};

/// Per-journal store of training papers, entries sorted by paper_id.
/// Immutable after build; safe to share across prediction threads.
class NeighborIndex {
 public:
  static NeighborIndex build(const Corpus& train, int k, int n);

  int k() const { return k_; }
  int n() const { return n_; }
  std::size_t journal_population(const std::string& journal) const;
  const std::vector<NeighborEntry>* journal_entries(
      const std::string& journal) const;

 private:
  int k_ = 0;
  int n_ = 0;
  std::map<std::string, std::vector<NeighborEntry>> by_journal_;
};

/// Euclidean distance between two early segments.
double matching_error(std::span<const double> x, std::span<const double> y);

/// The L same-journal training papers with smallest matching error to the
/// record's early segment, ranked by (distance, paper_id ascending).
/// Throws InsufficientDataError when the journal holds fewer than L papers.
std::vector<NeighborEntry> find_neighbors(const NeighborIndex& index,
                                          const CitationRecord& record,
                                          int k, std::size_t count);

/// Every future year predicted as the mean of the known years c_0..c_k.
PredictionResult mey_predict(const CitationRecord& record, int k, int n);

/// Per-year mean of the L nearest neighbors' actual futures.
PredictionResult avr_predict(const NeighborIndex& index,
                             const CitationRecord& record, int k, int n,
                             std::size_t count);

/// Fits a 3-component mixture to the neighbors' future segments, picks the
/// component whose responsibility-weighted early-segment centroid is closest
/// to the record's early segment, and predicts that component's future mean
/// clamped at 0.
PredictionResult gmm_predict(const NeighborIndex& index,
                             const CitationRecord& record, int k, int n,
                             std::size_t count, Rng& rng,
                             const GmmOptions& options = {});

/// How often the neighbor-based predictors had to degrade: 'reduced' means
/// the journal had fewer than L (but at least 3) training papers and all of
/// them were used; 'mey' means fewer than 3 and the MEY rule answered.
struct FallbackStats {
  std::size_t full = 0;
  std::size_t reduced = 0;
  std::size_t mey = 0;
};

enum class NeighborFallback { kFull, kReduced, kMey };

/// The degradation rule for a journal with the given index: full search at
/// L, all available papers when 3 <= population < L, MEY below that.
NeighborFallback classify_fallback(const NeighborIndex& index,
                                   const std::string& journal,
                                   std::size_t count);

PredictionResult avr_predict_with_fallback(const NeighborIndex& index,
                                           const CitationRecord& record,
                                           int k, int n, std::size_t count,
                                           FallbackStats& stats);

PredictionResult gmm_predict_with_fallback(const NeighborIndex& index,
                                           const CitationRecord& record,
                                           int k, int n, std::size_t count,
                                           Rng& rng, FallbackStats& stats,
                                           const GmmOptions& options = {});

}  // namespace nncp
