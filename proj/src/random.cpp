#include "ldp/random.hpp"

#include <cmath>

namespace ldp {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_hash(std::uint64_t seed, std::uint64_t row, std::uint64_t col) {
  return mix64(seed ^ mix64(row ^ mix64(col)));
}

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t bound = -n % n;  // 2^64 mod n
  std::uint64_t x = next_u64();
  while (x < bound) x = next_u64();
  return x % n;
}

double RandomSource::laplace(double scale) {
  const double u = next_double_open() - 0.5;  // (-0.5, 0.5), endpoints excluded
  const double mag = -scale * std::log(1.0 - 2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

double RandomSource::normal() {
  const double u1 = next_double_open();
  const double u2 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

RandomSource RandomSource::fork(std::uint64_t salt) const {
  return RandomSource(mix64(seed_ ^ mix64(salt ^ 0xd1b54a32d192ed03ULL)));
}

}  // namespace ldp
