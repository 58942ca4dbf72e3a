#include "ldp/aggregate.hpp"

#include <cmath>

namespace ldp {

MeanAccumulator::MeanAccumulator(std::size_t d) : sums_(d, 0.0) {
  if (d == 0) throw DegenerateParams("accumulator needs at least one attribute");
}

void MeanAccumulator::add_decoded(const std::vector<double>& decoded) {
  if (decoded.size() != sums_.size()) throw LengthMismatch("decoded report length does not match accumulator");
  for (std::size_t j = 0; j < sums_.size(); ++j) sums_[j] += decoded[j];
  ++count_;
}

void MeanAccumulator::add_report(const NumericReport& report) {
  if (report.d != sums_.size() || report.attr_index >= report.d) {
    throw LengthMismatch("numeric report does not match accumulator");
  }
  sums_[report.attr_index] += report.sign * static_cast<double>(report.d) * rr_scale(report.epsilon);
  ++count_;
}

MeanAccumulator MeanAccumulator::merge(const MeanAccumulator& a, const MeanAccumulator& b) {
  if (a.d() != b.d()) throw LengthMismatch("cannot merge accumulators of different widths");
  MeanAccumulator out(a.d());
  for (std::size_t j = 0; j < a.d(); ++j) out.sums_[j] = a.sums_[j] + b.sums_[j];
  out.count_ = a.count_ + b.count_;
  return out;
}

MeanSummary finalize_means(const MeanAccumulator& acc, double epsilon, double beta, double c) {
  if (acc.count() == 0) throw EmptyInput("no reports accumulated");
  PrivacyBudget check(epsilon);
  if (!(beta > 0.0 && beta < 1.0)) throw DegenerateParams("beta must lie in (0,1)");

  MeanSummary out;
  out.estimates.resize(acc.d());
  const double n = static_cast<double>(acc.count());
  for (std::size_t j = 0; j < acc.d(); ++j) out.estimates[j] = acc.sums()[j] / n;
  const double d = static_cast<double>(acc.d());
  out.deviation_bound = c * std::sqrt(d * std::log(d / beta)) / (epsilon * std::sqrt(n));
  return out;
}

FreqAccumulator::FreqAccumulator(std::uint64_t rows) : z_sum_(rows, 0.0) {
  if (rows == 0) throw DegenerateParams("accumulator needs at least one row");
  if (rows > (std::uint64_t{1} << 31)) throw TooLarge("projected dimension too large to accumulate");
}

void FreqAccumulator::add(const CategoricalReport& report, double scale) {
  if (report.s >= z_sum_.size()) throw LengthMismatch("report row outside the accumulator");
  z_sum_[report.s] += report.alpha * scale;
  ++count_;
}

FreqAccumulator FreqAccumulator::merge(const FreqAccumulator& a, const FreqAccumulator& b) {
  if (a.rows() != b.rows()) throw LengthMismatch("cannot merge accumulators of different widths");
  FreqAccumulator out(a.rows());
  for (std::size_t s = 0; s < a.z_sum_.size(); ++s) out.z_sum_[s] = a.z_sum_[s] + b.z_sum_[s];
  out.count_ = a.count_ + b.count_;
  return out;
}

std::vector<double> FreqAccumulator::finalize(const FrequencyMatrix& matrix, std::uint64_t n) const {
  if (count_ == 0 || n == 0) throw EmptyInput("no reports accumulated");
  if (matrix.rows() != rows()) throw LengthMismatch("matrix does not match accumulator");
  std::vector<double> est(matrix.cols(), 0.0);
  for (std::uint64_t s = 0; s < rows(); ++s) {
    if (z_sum_[s] == 0.0) continue;
    for (std::uint64_t l = 0; l < matrix.cols(); ++l) est[l] += z_sum_[s] * matrix.entry(s, l);
  }
  for (auto& v : est) v /= static_cast<double>(n);
  return est;
}

double linf_error(const std::vector<double>& estimate, const std::vector<double>& truth) {
  if (estimate.size() != truth.size()) throw LengthMismatch("estimate and truth lengths differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) worst = std::max(worst, std::abs(estimate[i] - truth[i]));
  return worst;
}

}  // namespace ldp
