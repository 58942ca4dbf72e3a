#pragma once

#include <cstdint>

namespace ldp {

// Stateless 64-bit mixer (splitmix64 finalizer). Used both as the PRNG
// core and to derive values that must be reproducible from coordinates
// alone, such as virtual matrix entries.
std::uint64_t mix64(std::uint64_t x);

// Hash of a (seed, row, col) cell, independent across cells. The top bit
// of the result selects virtual matrix signs.
std::uint64_t cell_hash(std::uint64_t seed, std::uint64_t row, std::uint64_t col);

// Deterministic random stream: a counter run through mix64. The same seed
// always yields the same sequence of draws on every platform, because no
// libc or libstdc++ distribution code is involved. position() counts raw
// 64-bit words consumed, which makes replay and stream-splitting auditable.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(mix64(seed + 0x9e3779b97f4a7c15ULL)), counter_(0) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return counter_; }

  std::uint64_t next_u64() { return mix64(seed_ ^ (counter_++ * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL)); }

  // Uniform on [0,1), 53 significant bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0,1); safe to pass to log().
  double next_double_open() { return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52; }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, n). Rejection keeps the distribution exact.
  std::uint64_t uniform_index(std::uint64_t n);

  // Laplace(0, scale) by inverse CDF.
  double laplace(double scale);

  // Standard normal by Box-Muller; consumes two draws per call.
  double normal();

  // Independent stream derived from this one's seed and a caller-chosen
  // salt. Forking does not consume draws from the parent.
  RandomSource fork(std::uint64_t salt) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace ldp
