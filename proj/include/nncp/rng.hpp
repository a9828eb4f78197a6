#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nncp {

/// Seeded pseudo-random number generator: xoshiro256** (Blackman & Vigna),
/// state expanded from the 64-bit seed with splitmix64. Self-contained so
/// that streams are bit-identical across platforms and standard libraries.
///
/// Stream contract: every method consumes a fixed number of next_u64 draws
/// (uniform: 1, normal: 2, below: 1 per rejection round, poisson: 1 per
/// inner iteration), so sequences are reproducible from the seed alone.
/// Single-owner; not safe to share across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01();

  /// Uniform in [lo, hi). Throws ArgumentError unless lo < hi.
  double uniform(double lo, double hi);

  /// Unbiased integer in [0, bound). Throws ArgumentError if bound == 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller; consumes exactly two draws per call.
  double normal();

  /// Poisson sample, Knuth's product-of-uniforms method. lambda <= 0 yields 0.
  long poisson(double lambda);

  /// Fisher-Yates shuffle of an index vector.
  void shuffle(std::vector<std::size_t>& values);

 private:
  std::uint64_t state_[4];
};

/// splitmix64 mix step, used to derive independent sub-stream seeds
/// (per-epoch dropout masks, per-paper GMM fits) from one master seed.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// FNV-1a 64-bit hash, used to key per-paper random streams by paper id.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace nncp
