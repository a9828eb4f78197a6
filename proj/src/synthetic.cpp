#include "nncp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "nncp/errors.hpp"

namespace nncp {

namespace {

enum class Archetype { rise_decay, flat_low, sleeping_beauty, monotone_decay };

Archetype pick_archetype(Rng& rng, const SyntheticOptions& opt, double total) {
  const double draw = rng.uniform01() * total;
  double edge = opt.weight_rise_decay;
  if (draw < edge) return Archetype::rise_decay;
  edge += opt.weight_flat_low;
  if (draw < edge) return Archetype::flat_low;
  edge += opt.weight_sleeping_beauty;
  if (draw < edge) return Archetype::sleeping_beauty;
  return Archetype::monotone_decay;
}

std::vector<double> intensity_curve(Rng& rng, Archetype archetype,
                                    const SyntheticOptions& opt,
                                    double journal_scale) {
  const int n = opt.horizon_n;
  std::vector<double> lambda(n + 1, 0.0);
  bool publication_lag = true;
  switch (archetype) {
    case Archetype::rise_decay: {
      const double log_amp = rng.uniform(std::log(opt.amp_lo),
                                         std::log(opt.amp_hi));
      const double amp = journal_scale * std::exp(log_amp);
      const double rank = (log_amp - std::log(opt.amp_lo)) /
                          (std::log(opt.amp_hi) - std::log(opt.amp_lo));
      const int t_peak = rank > 0.55 ? 3 + static_cast<int>(rng.below(2))
                                     : 1 + static_cast<int>(rng.below(2));
      const double tau = 3.0 + 10.0 * (0.3 * rng.uniform01() + 0.7 * rank);
      for (int i = 0; i <= n; ++i) {
        lambda[i] = i <= t_peak
                        ? amp * (i + 1) / (t_peak + 1)
                        : amp * std::exp(-(i - t_peak) / tau);
      }
      break;
    }
    case Archetype::flat_low: {
      std::fill(lambda.begin(), lambda.end(), opt.flat_rate);
      publication_lag = false;
      break;
    }
    case Archetype::sleeping_beauty: {
      const int wake = 6 + static_cast<int>(rng.below(5));
      const double amp = journal_scale * rng.uniform(5.0, 30.0);
      for (int i = 0; i <= n; ++i) {
        lambda[i] = i < wake ? 0.2
                             : amp * (1.0 - std::exp(-(i - wake + 1) / 2.0));
      }
      break;
    }
    case Archetype::monotone_decay: {
      const double amp = journal_scale * rng.uniform(1.0, 20.0);
      const double rank = (amp / journal_scale - 1.0) / 19.0;
      const double tau = 2.0 + 6.0 * (0.3 * rng.uniform01() + 0.7 * rank);
      for (int i = 0; i <= n; ++i) {
        lambda[i] = amp * std::exp(-i / tau);
      }
      break;
    }
  }
  if (publication_lag) {
    for (int i = 0; i <= n; ++i) {
      lambda[i] *= 1.0 - std::exp(-(i + 1) / 2.5);
    }
  }
  return lambda;
}

// Largest-remainder allocation of paper counts to journals, journals in
// name order so the outcome is deterministic.
std::vector<std::pair<std::string, std::size_t>> allocate_journals(
    const SyntheticOptions& opt) {
  std::vector<std::pair<std::string, std::size_t>> counts;
  std::vector<std::pair<double, std::string>> remainders;
  std::size_t assigned = 0;
  for (const auto& [journal, fraction] : opt.journal_mix) {
    const double ideal = fraction * static_cast<double>(opt.n_papers);
    const auto base = static_cast<std::size_t>(std::floor(ideal));
    counts.emplace_back(journal, base);
    remainders.emplace_back(ideal - std::floor(ideal), journal);
    assigned += base;
  }
  std::sort(remainders.begin(), remainders.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  std::size_t leftover = opt.n_papers - assigned;
  std::size_t cursor = 0;
  while (leftover > 0) {
    const auto& journal = remainders[cursor % remainders.size()].second;
    for (auto& [name, count] : counts) {
      if (name == journal) {
        ++count;
        break;
      }
    }
    --leftover;
    ++cursor;
  }
  return counts;
}

}  // namespace

double journal_amplitude(const std::string& journal_id) {
  if (journal_id == "NATURE") return 1.4;
  if (journal_id == "SCIENCE") return 1.2;
  if (journal_id == "NEJM") return 1.0;
  if (journal_id == "CELL") return 0.9;
  if (journal_id == "PNAS") return 0.8;
  return 1.0;
}

Corpus generate_synthetic(Rng& rng, const SyntheticOptions& opt) {
  if (opt.n_papers == 0) {
    throw ArgumentError("generate_synthetic: n_papers must be positive");
  }
  if (opt.horizon_n < 1) {
    throw ArgumentError("generate_synthetic: horizon must be >= 1");
  }
  if (opt.year_lo > opt.year_hi) {
    throw ArgumentError("generate_synthetic: year range lo must be <= hi");
  }
  if (opt.journal_mix.empty()) {
    throw ArgumentError("generate_synthetic: journal mix is empty");
  }
  double mix_sum = 0.0;
  for (const auto& [journal, fraction] : opt.journal_mix) {
    if (fraction < 0.0) {
      throw ArgumentError("generate_synthetic: negative fraction for " +
                          journal);
    }
    mix_sum += fraction;
  }
  if (std::abs(mix_sum - 1.0) > 1e-9) {
    throw ArgumentError("generate_synthetic: journal fractions must sum to 1");
  }
  const double weight_total = opt.weight_rise_decay + opt.weight_flat_low +
                              opt.weight_sleeping_beauty +
                              opt.weight_monotone_decay;
  if (!(weight_total > 0.0)) {
    throw ArgumentError("generate_synthetic: archetype weights sum to zero");
  }

  Corpus corpus;
  corpus.horizon_n = opt.horizon_n;
  corpus.records.reserve(opt.n_papers);

  const auto allocation = allocate_journals(opt);
  const auto year_span =
      static_cast<std::uint64_t>(opt.year_hi - opt.year_lo) + 1;

  std::size_t paper_index = 0;
  char id_buffer[16];
  for (const auto& [journal, count] : allocation) {
    const double scale = journal_amplitude(journal);
    for (std::size_t p = 0; p < count; ++p) {
      CitationRecord record;
      std::snprintf(id_buffer, sizeof(id_buffer), "S%07zu", ++paper_index);
      record.paper_id = id_buffer;
      record.journal_id = journal;
      record.publication_year =
          opt.year_lo + static_cast<int>(rng.below(year_span));
      const Archetype archetype = pick_archetype(rng, opt, weight_total);
      const auto lambda = intensity_curve(rng, archetype, opt, scale);
      record.citations.reserve(opt.horizon_n + 1);
      for (double rate : lambda) {
        record.citations.push_back(rng.poisson(rate));
      }
      corpus.journals.insert(journal);
      corpus.records.push_back(std::move(record));
    }
  }
  return corpus;
}

}  // namespace nncp
