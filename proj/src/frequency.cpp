#include "ldp/frequency.hpp"

#include <bit>
#include <cmath>

namespace ldp {

namespace {

std::uint64_t reverse_bits(std::uint64_t x) {
  x = ((x & 0x5555555555555555ULL) << 1) | ((x >> 1) & 0x5555555555555555ULL);
  x = ((x & 0x3333333333333333ULL) << 2) | ((x >> 2) & 0x3333333333333333ULL);
  x = ((x & 0x0f0f0f0f0f0f0f0fULL) << 4) | ((x >> 4) & 0x0f0f0f0f0f0f0f0fULL);
  x = ((x & 0x00ff00ff00ff00ffULL) << 8) | ((x >> 8) & 0x00ff00ff00ff00ffULL);
  x = ((x & 0x0000ffff0000ffffULL) << 16) | ((x >> 16) & 0x0000ffff0000ffffULL);
  return (x << 32) | (x >> 32);
}

}  // namespace

BSParams bs_params(std::uint64_t k, std::uint64_t n, double epsilon, double beta) {
  if (k < 2) throw DegenerateParams("frequency oracle needs k >= 2");
  if (n < 1) throw DegenerateParams("frequency oracle needs n >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw DegenerateParams("beta must lie in (0,1)");
  PrivacyBudget check(epsilon);

  BSParams p;
  p.k = k;
  p.n = n;
  p.epsilon = epsilon;
  p.beta = beta;
  p.gamma = std::sqrt(std::log(2.0 * static_cast<double>(k) / beta) /
                      (epsilon * epsilon * static_cast<double>(n)));
  const double m_raw = std::log(static_cast<double>(k) + 1.0) * std::log(2.0 / beta) / (p.gamma * p.gamma);
  if (!(m_raw > 0.0) || !std::isfinite(m_raw)) throw DegenerateParams("projected dimension collapsed");
  p.m = static_cast<std::uint64_t>(std::ceil(m_raw));
  if (p.m < 1) throw DegenerateParams("projected dimension collapsed");
  return p;
}

FrequencyMatrix FrequencyMatrix::random_projection(std::uint64_t rows, std::uint64_t cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw DegenerateParams("projection matrix needs positive dimensions");
  return FrequencyMatrix(Kind::random_projection, rows, cols, seed);
}

FrequencyMatrix FrequencyMatrix::orthogonal(std::uint64_t k) {
  if (k < 2) throw DegenerateParams("orthogonal matrix needs k >= 2");
  const std::uint64_t rows = std::bit_ceil(k);
  if (rows > (std::uint64_t{1} << 20)) throw Overflow("orthogonal construction supported up to 2^20 rows");
  FrequencyMatrix m(Kind::orthogonal, rows, k, 0);
  m.rev_shift_ = 64 - static_cast<std::uint64_t>(std::countr_zero(rows));
  return m;
}

int FrequencyMatrix::sign(std::uint64_t row, std::uint64_t col) const {
  if (row >= rows_ || col >= cols_) throw LengthMismatch("matrix index out of range");
  if (kind_ == Kind::random_projection) {
    return (cell_hash(seed_, row, col) >> 63) ? -1 : 1;
  }
  // Closed form of the doubling construction: expanding v -> {v||v, v||-v}
  // pairs the column's low bits with the row's high bits, which is a
  // bit-reversed sign rule. Column 0 is the all-ones vector.
  const std::uint64_t paired = row & (reverse_bits(col) >> rev_shift_);
  return (std::popcount(paired) & 1) ? -1 : 1;
}

double FrequencyMatrix::entry(std::uint64_t row, std::uint64_t col) const {
  return sign(row, col) / std::sqrt(static_cast<double>(rows_));
}

std::int64_t FrequencyMatrix::column_dot_raw(std::uint64_t a, std::uint64_t b) const {
  std::int64_t dot = 0;
  for (std::uint64_t r = 0; r < rows_; ++r) dot += sign(r, a) * sign(r, b);
  return dot;
}

double FrequencyMatrix::column_dot(std::uint64_t a, std::uint64_t b) const {
  return static_cast<double>(column_dot_raw(a, b)) / static_cast<double>(rows_);
}

double rr_binary_perturb(double value, const PrivacyBudget& epsilon, RandomSource& rng) {
  if (value != 1.0 && value != -1.0) throw DomainViolation("randomized response input must be -1 or +1");
  const double e = std::exp(epsilon.epsilon());
  const double c = (e + 1.0) / (e - 1.0);
  return rng.bernoulli(e / (e + 1.0)) ? c * value : -c * value;
}

CategoricalReport bs_perturb(std::uint64_t value, const FrequencyMatrix& matrix, const PrivacyBudget& epsilon,
                             RandomSource& rng) {
  if (value < 1 || value > matrix.cols()) throw DomainViolation("categorical value outside 1..k");
  const double e = std::exp(epsilon.epsilon());
  const double c = (e + 1.0) / (e - 1.0);

  CategoricalReport report;
  report.s = rng.uniform_index(matrix.rows());
  const double cell = c * static_cast<double>(matrix.rows()) * matrix.entry(report.s, value - 1);
  report.alpha = rng.bernoulli(e / (e + 1.0)) ? cell : -cell;
  return report;
}

std::vector<double> estimate_frequencies(const std::vector<CategoricalReport>& reports,
                                         const FrequencyMatrix& matrix, std::uint64_t n) {
  if (reports.empty() || n == 0) throw EmptyInput("no reports to estimate from");
  if (matrix.rows() > (std::uint64_t{1} << 31)) throw TooLarge("projected dimension too large to accumulate");

  std::vector<double> z(matrix.rows(), 0.0);
  for (const auto& r : reports) {
    if (r.s >= matrix.rows()) throw LengthMismatch("report row outside the matrix");
    z[r.s] += r.alpha;
  }
  std::vector<double> est(matrix.cols(), 0.0);
  for (std::uint64_t s = 0; s < matrix.rows(); ++s) {
    if (z[s] == 0.0) continue;
    for (std::uint64_t l = 0; l < matrix.cols(); ++l) est[l] += z[s] * matrix.entry(s, l);
  }
  for (auto& v : est) v /= static_cast<double>(n);
  return est;
}

std::vector<double> clip_frequencies(const std::vector<double>& estimates) {
  if (estimates.empty()) throw EmptyInput("no estimates to clip");
  std::vector<double> out(estimates.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::min(1.0, std::max(0.0, estimates[i]));
    total += out[i];
  }
  if (total > 0.0) {
    for (auto& v : out) v /= total;
  }
  return out;
}

}  // namespace ldp
