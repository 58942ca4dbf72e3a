#pragma once

#include <cstdint>
#include <vector>

#include "ldp/frequency.hpp"
#include "ldp/numeric.hpp"

namespace ldp {

// Running sums of decoded numeric reports. Merging two accumulators is
// the same as accumulating the concatenated streams, so shards can be
// reduced in any order.
class MeanAccumulator {
 public:
  explicit MeanAccumulator(std::size_t d);

  void add_decoded(const std::vector<double>& decoded);
  void add_report(const NumericReport& report);

  std::size_t d() const { return sums_.size(); }
  std::uint64_t count() const { return count_; }
  const std::vector<double>& sums() const { return sums_; }

  static MeanAccumulator merge(const MeanAccumulator& a, const MeanAccumulator& b);

 private:
  std::vector<double> sums_;
  std::uint64_t count_ = 0;
};

struct MeanSummary {
  std::vector<double> estimates;
  // Width of the high-probability band around each estimate:
  // c * sqrt(d * log(d/beta)) / (eps * sqrt(n)). Diagnostic only; the
  // estimates are returned even when they fall outside it.
  double deviation_bound = 0.0;
};

MeanSummary finalize_means(const MeanAccumulator& acc, double epsilon, double beta = 0.05, double c = 2.0);

// Per-row sums of frequency-oracle report magnitudes (the numerator of
// the mean sparse vector), with the same merge laws.
class FreqAccumulator {
 public:
  explicit FreqAccumulator(std::uint64_t rows);

  void add(const CategoricalReport& report, double scale = 1.0);

  std::uint64_t rows() const { return z_sum_.size(); }
  std::uint64_t count() const { return count_; }
  const std::vector<double>& z_sum() const { return z_sum_; }

  static FreqAccumulator merge(const FreqAccumulator& a, const FreqAccumulator& b);

  // Column inner products against the mean vector, divided by n reporting
  // users (callers pass the full population when only a subset reported
  // this attribute).
  std::vector<double> finalize(const FrequencyMatrix& matrix, std::uint64_t n) const;

 private:
  std::vector<double> z_sum_;
  std::uint64_t count_ = 0;
};

double linf_error(const std::vector<double>& estimate, const std::vector<double>& truth);

}  // namespace ldp
