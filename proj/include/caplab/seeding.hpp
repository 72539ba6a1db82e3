#pragma once
// Deterministic seed derivation and the random engine used everywhere.
//
// Seed derivation (stable, documented so runs can be reproduced elsewhere):
//   fnv    = FNV-1a 64-bit hash of the label bytes
//            (offset 0xcbf29ce484222325, prime 0x100000001b3)
//   seed   = splitmix64(splitmix64(master ^ fnv) + counter)
// where splitmix64 is the standard finalizer
//   z  = x + 0x9e3779b97f4a7c15
//   z ^= z >> 30; z *= 0xbf58476d1ce4e5b9
//   z ^= z >> 27; z *= 0x94d049bb133111eb
//   z ^= z >> 31
// Distinct (label, counter) pairs give independent streams for the same
// master seed. Uniform doubles are produced as (x >> 11) * 2^-53 from the
// engine's 64-bit output, so sampling never depends on implementation-defined
// standard-library distributions.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace caplab {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

/// Derive a child seed from a master seed, a stream label and a counter.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t counter);

/// Deterministic random engine (mersenne twister with explicit double
/// conversion; the output sequence is fixed by the C++ standard).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n). Rejection-free modulo is fine for the desk
  /// scales used here, but we reject to keep the draw exactly uniform.
  std::uint64_t next_below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Inverse-CDF draw of an index weighted by `probs` (values assumed to sum to
/// ~1; the final index absorbs rounding).
std::size_t sample_index(const std::vector<double>& probs, Rng& rng);

}  // namespace caplab
