#pragma once

#include <cstdint>
#include <random>

namespace sharpbench {

// Deterministic random helpers. std::mt19937_64 has a standard-fixed output
// sequence, but the standard <random> distributions do not, so the mappings
// from raw 64-bit draws to doubles live here and are identical on every
// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. No spare caching: two raw draws per
  // value keeps the stream position a pure function of the call count.
  double normal();

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a base seed and a stream tag
// (splitmix64 finalizer). Used to give every dataset, axis, cluster and
// restart its own namespace.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t s1, std::uint64_t s2);

}  // namespace sharpbench
