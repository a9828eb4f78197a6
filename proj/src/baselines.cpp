#include "nncp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nncp/errors.hpp"

namespace nncp {

namespace {

void require_history(const CitationRecord& record, int k) {
  if (record.citations.size() < static_cast<std::size_t>(k) + 1) {
    throw ArgumentError("record " + record.paper_id + " has " +
                        std::to_string(record.citations.size()) +
                        " observed years, need " + std::to_string(k + 1));
  }
}

std::vector<double> early_segment(const CitationRecord& record, int k) {
  std::vector<double> early(static_cast<std::size_t>(k) + 1);
  for (int t = 0; t <= k; ++t) {
    early[static_cast<std::size_t>(t)] =
        static_cast<double>(record.citations[static_cast<std::size_t>(t)]);
  }
  return early;
}

double squared_error(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

PredictionResult from_yearly(const CitationRecord& record,
                             std::vector<double> yearly) {
  PredictionResult out;
  out.paper_id = record.paper_id;
  out.yearly = std::move(yearly);
  out.total = 0.0;
  for (double v : out.yearly) out.total += v;
  return out;
}

}  // namespace

NeighborIndex NeighborIndex::build(const Corpus& train, int k, int n) {
  if (k < 0 || k >= n) {
    throw ArgumentError("neighbor index: need 0 <= k < n");
  }
  NeighborIndex index;
  index.k_ = k;
  index.n_ = n;
  for (const CitationRecord& record : train.records) {
    if (record.citations.size() < static_cast<std::size_t>(n) + 1) {
      throw ArgumentError("record " + record.paper_id +
                          " too short for horizon " + std::to_string(n));
    }
    NeighborEntry entry;
    entry.paper_id = record.paper_id;
    entry.early = early_segment(record, k);
    entry.future.reserve(static_cast<std::size_t>(n - k));
    for (int t = k + 1; t <= n; ++t) {
      entry.future.push_back(
          static_cast<double>(record.citations[static_cast<std::size_t>(t)]));
    }
    index.by_journal_[record.journal_id].push_back(std::move(entry));
  }
  for (auto& [journal, entries] : index.by_journal_) {
    std::sort(entries.begin(), entries.end(),
              [](const NeighborEntry& a, const NeighborEntry& b) {
                return a.paper_id < b.paper_id;
              });
  }
  return index;
}

std::size_t NeighborIndex::journal_population(
    const std::string& journal) const {
  auto it = by_journal_.find(journal);
  return it == by_journal_.end() ? 0 : it->second.size();
}

const std::vector<NeighborEntry>* NeighborIndex::journal_entries(
    const std::string& journal) const {
  auto it = by_journal_.find(journal);
  return it == by_journal_.end() ? nullptr : &it->second;
}

double matching_error(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ShapeError("matching_error: segment lengths " +
                     std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()));
  }
  return std::sqrt(squared_error(x, y));
}

std::vector<NeighborEntry> find_neighbors(const NeighborIndex& index,
                                          const CitationRecord& record,
                                          int k, std::size_t count) {
  if (k != index.k()) {
    throw ArgumentError("find_neighbors: index built for k=" +
                        std::to_string(index.k()));
  }
  if (count == 0) throw ArgumentError("find_neighbors: L must be >= 1");
  require_history(record, k);
  const std::vector<NeighborEntry>* entries =
      index.journal_entries(record.journal_id);
  if (!entries || entries->size() < count) {
    throw InsufficientDataError(
        "journal " + record.journal_id + " has " +
        std::to_string(entries ? entries->size() : 0) +
        " training papers, need " + std::to_string(count));
  }
  const std::vector<double> query = early_segment(record, k);

  // Rank on squared distance: counts are integers, so distances compare
  // exactly and the brute-force oracle can match bit for bit.
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(entries->size());
  for (std::size_t i = 0; i < entries->size(); ++i) {
    ranked.emplace_back(squared_error(query, (*entries)[i].early), i);
  }
  std::partial_sort(ranked.begin(), ranked.begin() + count, ranked.end(),
                    [&](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return (*entries)[a.second].paper_id <
                             (*entries)[b.second].paper_id;
                    });
  std::vector<NeighborEntry> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back((*entries)[ranked[i].second]);
  }
  return out;
}

PredictionResult mey_predict(const CitationRecord& record, int k, int n) {
  if (k < 0 || k >= n) throw ArgumentError("mey_predict: need 0 <= k < n");
  require_history(record, k);
  double sum = 0.0;
  for (int t = 0; t <= k; ++t) {
    sum += static_cast<double>(record.citations[static_cast<std::size_t>(t)]);
  }
  const double mean = sum / static_cast<double>(k + 1);
  return from_yearly(record,
                     std::vector<double>(static_cast<std::size_t>(n - k),
                                         mean));
}

PredictionResult avr_predict(const NeighborIndex& index,
                             const CitationRecord& record, int k, int n,
                             std::size_t count) {
  if (n != index.n()) {
    throw ArgumentError("avr_predict: index built for n=" +
                        std::to_string(index.n()));
  }
  const std::vector<NeighborEntry> neighbors =
      find_neighbors(index, record, k, count);
  std::vector<double> yearly(static_cast<std::size_t>(n - k), 0.0);
  for (const NeighborEntry& neighbor : neighbors) {
    for (std::size_t i = 0; i < yearly.size(); ++i) {
      yearly[i] += neighbor.future[i];
    }
  }
  for (double& v : yearly) v /= static_cast<double>(neighbors.size());
  return from_yearly(record, std::move(yearly));
}

PredictionResult gmm_predict(const NeighborIndex& index,
                             const CitationRecord& record, int k, int n,
                             std::size_t count, Rng& rng,
                             const GmmOptions& options) {
  if (n != index.n()) {
    throw ArgumentError("gmm_predict: index built for n=" +
                        std::to_string(index.n()));
  }
  const std::vector<NeighborEntry> neighbors =
      find_neighbors(index, record, k, count);
  if (neighbors.size() < 3) {
    throw InsufficientDataError("gmm_predict: need at least 3 neighbors");
  }
  const std::size_t dims = static_cast<std::size_t>(n - k);
  Matrix futures(neighbors.size(), dims);
  for (std::size_t r = 0; r < neighbors.size(); ++r) {
    for (std::size_t d = 0; d < dims; ++d) {
      futures(r, d) = neighbors[r].future[d];
    }
  }

  const GmmFitResult fit = fit_gmm(futures, 3, rng, options);
  const Matrix resp = responsibilities(fit.params, futures);

  // Components are fit on futures, but similarity must be judged on the
  // known years, so each component gets a responsibility-weighted centroid
  // over the neighbors' early segments.
  const std::vector<double> query = early_segment(record, k);
  const std::size_t early_len = query.size();
  double best_distance = std::numeric_limits<double>::infinity();
  std::size_t best_component = 0;
  for (std::size_t c = 0; c < fit.params.components(); ++c) {
    double mass = 0.0;
    for (std::size_t r = 0; r < neighbors.size(); ++r) mass += resp(r, c);
    if (mass < 1e-12) continue;
    std::vector<double> centroid(early_len, 0.0);
    for (std::size_t r = 0; r < neighbors.size(); ++r) {
      for (std::size_t d = 0; d < early_len; ++d) {
        centroid[d] += resp(r, c) * neighbors[r].early[d];
      }
    }
    for (double& v : centroid) v /= mass;
    const double distance = matching_error(query, centroid);
    if (distance < best_distance) {
      best_distance = distance;
      best_component = c;
    }
  }

  std::vector<double> yearly(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    yearly[d] = std::max(0.0, fit.params.means(best_component, d));
  }
  return from_yearly(record, std::move(yearly));
}

NeighborFallback classify_fallback(const NeighborIndex& index,
                                   const std::string& journal,
                                   std::size_t count) {
  const std::size_t population = index.journal_population(journal);
  if (population >= count) return NeighborFallback::kFull;
  if (population >= 3) return NeighborFallback::kReduced;
  return NeighborFallback::kMey;
}

PredictionResult avr_predict_with_fallback(const NeighborIndex& index,
                                           const CitationRecord& record,
                                           int k, int n, std::size_t count,
                                           FallbackStats& stats) {
  switch (classify_fallback(index, record.journal_id, count)) {
    case NeighborFallback::kFull:
      ++stats.full;
      return avr_predict(index, record, k, n, count);
    case NeighborFallback::kReduced:
      ++stats.reduced;
      return avr_predict(index, record, k, n,
                         index.journal_population(record.journal_id));
    case NeighborFallback::kMey:
      break;
  }
  ++stats.mey;
  return mey_predict(record, k, n);
}

PredictionResult gmm_predict_with_fallback(const NeighborIndex& index,
                                           const CitationRecord& record,
                                           int k, int n, std::size_t count,
                                           Rng& rng, FallbackStats& stats,
                                           const GmmOptions& options) {
  switch (classify_fallback(index, record.journal_id, count)) {
    case NeighborFallback::kFull:
      ++stats.full;
      return gmm_predict(index, record, k, n, count, rng, options);
    case NeighborFallback::kReduced:
      ++stats.reduced;
      return gmm_predict(index, record, k, n,
                         index.journal_population(record.journal_id), rng,
                         options);
    case NeighborFallback::kMey:
      break;
  }
  ++stats.mey;
  return mey_predict(record, k, n);
}

}  // namespace nncp
