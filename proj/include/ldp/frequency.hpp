#pragma once

#include <cstdint>
#include <vector>

#include "ldp/random.hpp"
#include "ldp/schema.hpp"

namespace ldp {

// Parameters of the random-projection frequency oracle. gamma is the
// target estimation error and m the projected dimension derived from it.
struct BSParams {
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  double epsilon = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::uint64_t m = 0;
};

BSParams bs_params(std::uint64_t k, std::uint64_t n, double epsilon, double beta);

// The projection used by the categorical mechanisms. Entries are never
// stored: random_projection entries are hashed from (seed, row, col), and
// orthogonal entries come from the closed form of the doubling
// construction, so the matrix stays O(1) in memory at any size.
class FrequencyMatrix {
 public:
  enum class Kind { random_projection, orthogonal };

  static FrequencyMatrix random_projection(std::uint64_t rows, std::uint64_t cols, std::uint64_t seed);

  // Columns are the first k vectors of the doubled orthogonal set, with
  // the all-ones vector first; rows = k rounded up to a power of two.
  static FrequencyMatrix orthogonal(std::uint64_t k);

  Kind kind() const { return kind_; }
  std::uint64_t rows() const { return rows_; }
  std::uint64_t cols() const { return cols_; }
  std::uint64_t seed() const { return seed_; }

  // Entry sign in {-1, +1}.
  int sign(std::uint64_t row, std::uint64_t col) const;

  // Scaled entry: sign / sqrt(rows).
  double entry(std::uint64_t row, std::uint64_t col) const;

  // Integer dot product of two sign columns; exact.
  std::int64_t column_dot_raw(std::uint64_t a, std::uint64_t b) const;

  // Scaled column dot product: raw / rows, so a column against itself is
  // exactly 1.
  double column_dot(std::uint64_t a, std::uint64_t b) const;

 private:
  FrequencyMatrix(Kind kind, std::uint64_t rows, std::uint64_t cols, std::uint64_t seed)
      : kind_(kind), rows_(rows), cols_(cols), seed_(seed) {}

  Kind kind_;
  std::uint64_t rows_;
  std::uint64_t cols_;
  std::uint64_t seed_;
  std::uint64_t rev_shift_ = 0;  // orthogonal: 64 - log2(rows), for bit reversal
};

// One user's frequency-oracle submission: a row index and a signed cell
// magnitude. attr_index stays 0 for single-attribute use.
struct CategoricalReport {
  std::uint64_t s = 0;  // 0-based row
  double alpha = 0.0;
  std::size_t attr_index = 0;
};

// Classic binary randomized response on {-1,+1}, rescaled to be unbiased.
double rr_binary_perturb(double value, const PrivacyBudget& epsilon, RandomSource& rng);

// One frequency-oracle report for value in 1..k: pick a uniform row s,
// then release the (scaled) cell at column `value` with the randomized
// response coin. alpha = +/- c_eps * rows * entry(s, value-1).
CategoricalReport bs_perturb(std::uint64_t value, const FrequencyMatrix& matrix, const PrivacyBudget& epsilon,
                             RandomSource& rng);

// Frequency estimates from reports produced against `matrix`. n is the
// full reporting population (which may exceed reports.size() when users
// reported other attributes). Estimates are raw inner products and may
// leave [0,1].
std::vector<double> estimate_frequencies(const std::vector<CategoricalReport>& reports,
                                         const FrequencyMatrix& matrix, std::uint64_t n);

// Optional post-processing: clamp to [0,1] and rescale to sum 1.
std::vector<double> clip_frequencies(const std::vector<double>& estimates);

}  // namespace ldp
