#pragma once

#include <map>
#include <variant>
#include <vector>

#include "ldp/frequency.hpp"
#include "ldp/numeric.hpp"
#include "ldp/schema.hpp"

namespace ldp {

// One matrix per categorical attribute, keyed by attribute index.
using MatrixMap = std::map<std::size_t, FrequencyMatrix>;

// A single-attribute submission under the uniform-pick protocol. The
// categorical cell keeps its single-attribute alpha; `scale` records the
// factor d that the estimator applies at decode time.
struct MultiReport {
  std::size_t attr_index = 0;
  std::size_t scale = 1;
  std::variant<NumericReport, CategoricalReport> payload;
};

// Full-tuple submission of the budget-splitting baseline: one dense
// {-B,B} block covering the numeric attributes (in schema order) plus one
// frequency-oracle cell per categorical attribute.
struct HybridReport {
  std::vector<double> numeric_block;
  std::vector<CategoricalReport> cells;
};

// Estimates keyed by attribute index.
struct AttributeEstimates {
  std::map<std::size_t, double> numeric_means;
  std::map<std::size_t, std::vector<double>> categorical_freqs;
};

// Uniform-pick protocol: choose one attribute j, then run the one-bit
// numeric mechanism or the frequency oracle on it at the full budget.
MultiReport multi_perturb(const UserTuple& tuple, const Schema& schema, const PrivacyBudget& epsilon,
                          const MatrixMap& matrices, RandomSource& rng);

// Budget-splitting baseline: the {-B,B} mechanism on the numeric block at
// d_n/d of the budget, then the frequency oracle per categorical value at
// 1/d of the budget each.
HybridReport hybrid_perturb(const UserTuple& tuple, const Schema& schema, const PrivacyBudget& epsilon,
                            const MatrixMap& matrices, RandomSource& rng);

// Means and frequencies from uniform-pick reports. Denominators use the
// full report count n, not per-attribute counts; that is what keeps the
// estimators unbiased when each user reports only one attribute.
AttributeEstimates estimate_from_multi(const std::vector<MultiReport>& reports, const Schema& schema,
                                       const MatrixMap& matrices);

AttributeEstimates estimate_from_hybrid(const std::vector<HybridReport>& reports, const Schema& schema,
                                        const MatrixMap& matrices);

}  // namespace ldp
