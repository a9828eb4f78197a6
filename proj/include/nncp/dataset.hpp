#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace nncp {

/// One paper's identity plus its yearly citation counts c_0..c_n.
struct CitationRecord {
  std::string paper_id;
  std::string journal_id;
  int publication_year = 0;
  std::vector<long> citations;  // length horizon_n + 1, all >= 0
};

/// A collection of citation histories that share one horizon.
struct Corpus {
  std::vector<CitationRecord> records;
  int horizon_n = 14;
  std::set<std::string> journals;

  std::size_t size() const { return records.size(); }
};

/// Inclusive publication-year ranges for the train/test partition.
struct SplitSpec {
  int train_lo = 1980;
  int train_hi = 1997;
  int test_lo = 1998;
  int test_hi = 2002;
};

struct SplitResult {
  Corpus train;
  Corpus test;
  std::size_t dropped = 0;  // records outside both ranges
};

/// Reads a corpus from CSV. Expected layout, UTF-8, one header row:
///   paper_id,journal_id,publication_year,c0,c1,...,c{n}
/// Ids are unquoted alphanumeric tokens. Rows with the wrong column count,
/// non-integer or negative citations raise ParseError naming the line;
/// duplicate paper ids raise ValidationError; a missing file raises IoError.
Corpus load_corpus(const std::string& path, int horizon_n);

/// Writes the corpus in the exact format load_corpus reads (round-trip
/// identity). Deterministic byte output for a given corpus.
void write_corpus(const Corpus& corpus, const std::string& path);

/// Partitions records by publication year. Records outside both ranges are
/// dropped and counted. Overlapping ranges raise ArgumentError.
SplitResult split(const Corpus& corpus, const SplitSpec& spec);

/// Stable order: sorts records by paper_id so downstream results do not
/// depend on CSV row order.
void sort_by_paper_id(Corpus& corpus);

/// FNV-1a fingerprint over the canonical serialization; used to key the
/// model cache in sweep runs.
std::uint64_t corpus_fingerprint(const Corpus& corpus);

}  // namespace nncp
