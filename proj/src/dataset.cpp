#include "nncp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "nncp/errors.hpp"
#include "nncp/rng.hpp"

namespace nncp {

namespace {

std::string expected_header(int horizon_n) {
  std::string header = "paper_id,journal_id,publication_year";
  for (int i = 0; i <= horizon_n; ++i) {
    header += ",c" + std::to_string(i);
  }
  return header;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

long parse_long(const std::string& field, std::size_t line_no,
                const char* what) {
  long value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what +
                     " is not an integer: '" + field + "'");
  }
  return value;
}

}  // namespace

Corpus load_corpus(const std::string& path, int horizon_n) {
  if (horizon_n < 1) {
    throw ArgumentError("load_corpus: horizon must be >= 1");
  }
  std::ifstream in(path);
  if (!in) {
    throw IoError("load_corpus: cannot open '" + path + "'");
  }

  const std::size_t expected_cols = 3 + static_cast<std::size_t>(horizon_n) + 1;
  Corpus corpus;
  corpus.horizon_n = horizon_n;

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError("line 1: missing header row");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header(horizon_n)) {
    throw ParseError("line 1: header does not match '" +
                     expected_header(horizon_n) + "'");
  }

  std::unordered_set<std::string> seen_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto fields = split_csv_line(line);
    if (fields.size() != expected_cols) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(expected_cols) + " columns, got " +
                       std::to_string(fields.size()));
    }

    CitationRecord record;
    record.paper_id = fields[0];
    record.journal_id = fields[1];
    if (record.paper_id.empty() || record.journal_id.empty()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": empty paper or journal id");
    }
    record.publication_year =
        static_cast<int>(parse_long(fields[2], line_no, "publication_year"));
    record.citations.reserve(horizon_n + 1);
    for (int i = 0; i <= horizon_n; ++i) {
      const long c = parse_long(fields[3 + i], line_no,
                                ("c" + std::to_string(i)).c_str());
      if (c < 0) {
        throw ParseError("line " + std::to_string(line_no) + ": c" +
                         std::to_string(i) + " is negative");
      }
      record.citations.push_back(c);
    }

    if (!seen_ids.insert(record.paper_id).second) {
      throw ValidationError("duplicate paper_id '" + record.paper_id + "'");
    }
    corpus.journals.insert(record.journal_id);
    corpus.records.push_back(std::move(record));
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("write_corpus: cannot open '" + path + "' for writing");
  }
  out << expected_header(corpus.horizon_n) << '\n';
  for (const auto& record : corpus.records) {
    out << record.paper_id << ',' << record.journal_id << ','
        << record.publication_year;
    for (long c : record.citations) out << ',' << c;
    out << '\n';
  }
  if (!out) {
    throw IoError("write_corpus: write failed for '" + path + "'");
  }
}

SplitResult split(const Corpus& corpus, const SplitSpec& spec) {
  if (spec.train_lo > spec.train_hi || spec.test_lo > spec.test_hi) {
    throw ArgumentError("split: year range lo must be <= hi");
  }
  const bool overlap =
      spec.train_lo <= spec.test_hi && spec.test_lo <= spec.train_hi;
  if (overlap) {
    throw ArgumentError("split: train and test year ranges overlap");
  }

  SplitResult result;
  result.train.horizon_n = corpus.horizon_n;
  result.test.horizon_n = corpus.horizon_n;
  for (const auto& record : corpus.records) {
    const int y = record.publication_year;
    if (y >= spec.train_lo && y <= spec.train_hi) {
      result.train.journals.insert(record.journal_id);
      result.train.records.push_back(record);
    } else if (y >= spec.test_lo && y <= spec.test_hi) {
      result.test.journals.insert(record.journal_id);
      result.test.records.push_back(record);
    } else {
      ++result.dropped;
    }
  }
  return result;
}

void sort_by_paper_id(Corpus& corpus) {
  std::sort(corpus.records.begin(), corpus.records.end(),
            [](const CitationRecord& a, const CitationRecord& b) {
              return a.paper_id < b.paper_id;
            });
}

std::uint64_t corpus_fingerprint(const Corpus& corpus) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  auto absorb = [&hash](const std::string& text) {
    for (unsigned char c : text) {
      hash ^= c;
      hash *= 0x100000001B3ULL;
    }
    hash ^= 0x1F;
    hash *= 0x100000001B3ULL;
  };
  absorb(std::to_string(corpus.horizon_n));
  for (const auto& record : corpus.records) {
    absorb(record.paper_id);
    absorb(record.journal_id);
    absorb(std::to_string(record.publication_year));
    for (long c : record.citations) absorb(std::to_string(c));
  }
  return hash;
}

}  // namespace nncp
