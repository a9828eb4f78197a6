#pragma once

#include <map>
#include <string>

#include "nncp/dataset.hpp"
#include "nncp/rng.hpp"

namespace nncp {

/// Knobs for the synthetic corpus generator. The generator is a pure
/// function of (rng seed, options): identical inputs give identical corpora.
///
/// Each paper draws one citation-curve archetype, a yearly intensity curve
/// lambda_0..lambda_n from it, and then c_i ~ Poisson(lambda_i):
///
///   rise_decay      lambda_i = A*(i+1)/(t_peak+1) up to t_peak, then
///                   A*exp(-(i-t_peak)/tau); A log-uniform in
///                   [amp_lo, amp_hi]. The amplitude rank drives
///                   longevity: high-rank papers peak at t_peak in {3,4}
///                   and decay with tau toward 13, low-rank papers peak
///                   at {1,2} and fade within a few years.
///   flat_low        lambda_i = flat_rate for all years. Closed-form mean
///                   yearly citation count = flat_rate.
///   sleeping_beauty lambda_i = 0.2 until a wake year in {6..10}, then
///                   A*(1 - exp(-(i - wake + 1)/2)); A uniform in [5, 30].
///   monotone_decay  lambda_i = A*exp(-i/tau); A uniform in [1, 20] with
///                   tau in [2, 8], again higher amplitudes decaying
///                   slower.
///
/// Every archetype except flat_low is damped by a publication-lag ramp
/// 1 - exp(-(i+1)/2.5), so first-year counts stay low for every paper.
/// Journals scale the amplitude A of every archetype except flat_low by a
/// fixed multiplier (journal_amplitude below), so same-journal histories
/// cluster. These stochastic forms are a stand-in corpus for experiments;
/// they are not calibrated to any real citation index.
struct SyntheticOptions {
  std::size_t n_papers = 0;
  int horizon_n = 14;
  std::map<std::string, double> journal_mix = {{"NATURE", 0.35},
                                               {"SCIENCE", 0.25},
                                               {"NEJM", 0.20},
                                               {"CELL", 0.15},
                                               {"PNAS", 0.05}};
  int year_lo = 1980;
  int year_hi = 2002;

  double weight_rise_decay = 0.58;
  double weight_flat_low = 0.20;
  double weight_sleeping_beauty = 0.02;
  double weight_monotone_decay = 0.20;

  double flat_rate = 1.0;
  double amp_lo = 2.0;
  double amp_hi = 40.0;
};

/// Amplitude multiplier applied per journal (1.0 for unknown journals).
double journal_amplitude(const std::string& journal_id);

/// Generates a corpus of synthetic citation histories. Throws ArgumentError
/// if n_papers is zero, the journal fractions do not sum to 1 within 1e-9,
/// or the archetype weights are degenerate.
Corpus generate_synthetic(Rng& rng, const SyntheticOptions& options);

}  // namespace nncp
