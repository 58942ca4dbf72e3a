#include "ldp/multi.hpp"

#include <cmath>

namespace ldp {

namespace {

const FrequencyMatrix& matrix_for(const MatrixMap& matrices, std::size_t attr_index, const Schema& schema) {
  const auto it = matrices.find(attr_index);
  if (it == matrices.end()) {
    throw MissingMatrix("no frequency matrix registered for attribute '" + schema.at(attr_index).name + "'");
  }
  return it->second;
}

}  // namespace

MultiReport multi_perturb(const UserTuple& tuple, const Schema& schema, const PrivacyBudget& epsilon,
                          const MatrixMap& matrices, RandomSource& rng) {
  validate_tuple(schema, tuple);
  const std::size_t d = schema.size();
  const std::size_t j = static_cast<std::size_t>(rng.uniform_index(d));

  MultiReport report;
  report.attr_index = j;
  report.scale = d;

  if (schema.at(j).kind == AttrKind::numeric) {
    const double e = std::exp(epsilon.epsilon());
    NumericReport bit;
    bit.d = d;
    bit.epsilon = epsilon.epsilon();
    bit.attr_index = j;
    bit.sign = rng.bernoulli((tuple[j] * (e - 1.0) + e + 1.0) / (2.0 * e + 2.0)) ? +1 : -1;
    report.payload = bit;
  } else {
    const auto& matrix = matrix_for(matrices, j, schema);
    CategoricalReport cell = bs_perturb(static_cast<std::uint64_t>(tuple[j]), matrix, epsilon, rng);
    cell.attr_index = j;
    report.payload = cell;
  }
  return report;
}

HybridReport hybrid_perturb(const UserTuple& tuple, const Schema& schema, const PrivacyBudget& epsilon,
                            const MatrixMap& matrices, RandomSource& rng) {
  validate_tuple(schema, tuple);
  const std::size_t d = schema.size();
  const auto numeric_idx = schema.numeric_indices();

  HybridReport report;
  if (!numeric_idx.empty()) {
    UserTuple numeric_block;
    numeric_block.values.reserve(numeric_idx.size());
    for (std::size_t j : numeric_idx) numeric_block.values.push_back(tuple[j]);
    const PrivacyBudget numeric_budget(epsilon.epsilon() * static_cast<double>(numeric_idx.size()) /
                                       static_cast<double>(d));
    report.numeric_block = duchi_perturb(numeric_block, numeric_budget, DuchiVariant::fixed, rng);
  }
  const PrivacyBudget per_attr_budget = epsilon.split(d);
  for (std::size_t j : schema.categorical_indices()) {
    const auto& matrix = matrix_for(matrices, j, schema);
    CategoricalReport cell = bs_perturb(static_cast<std::uint64_t>(tuple[j]), matrix, per_attr_budget, rng);
    cell.attr_index = j;
    report.cells.push_back(cell);
  }
  return report;
}

AttributeEstimates estimate_from_multi(const std::vector<MultiReport>& reports, const Schema& schema,
                                       const MatrixMap& matrices) {
  if (reports.empty()) throw EmptyInput("no reports to estimate from");
  const std::uint64_t n = reports.size();

  std::map<std::size_t, double> sums;
  std::map<std::size_t, std::vector<CategoricalReport>> cells;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (schema.at(j).kind == AttrKind::numeric) {
      sums[j] = 0.0;
    } else {
      cells[j] = {};
    }
  }

  for (const auto& report : reports) {
    if (report.attr_index >= schema.size()) throw LengthMismatch("report attribute index outside the schema");
    if (const auto* bit = std::get_if<NumericReport>(&report.payload)) {
      const auto decoded = decode_numeric_report(*bit);
      sums[report.attr_index] += decoded[bit->attr_index];
    } else {
      CategoricalReport cell = std::get<CategoricalReport>(report.payload);
      cell.alpha *= static_cast<double>(report.scale);
      cells[cell.attr_index].push_back(cell);
    }
  }

  AttributeEstimates out;
  for (const auto& [j, sum] : sums) out.numeric_means[j] = sum / static_cast<double>(n);
  for (auto& [j, attr_cells] : cells) {
    const auto& matrix = matrix_for(matrices, j, schema);
    if (attr_cells.empty()) {
      out.categorical_freqs[j] = std::vector<double>(matrix.cols(), 0.0);
    } else {
      out.categorical_freqs[j] = estimate_frequencies(attr_cells, matrix, n);
    }
  }
  return out;
}

AttributeEstimates estimate_from_hybrid(const std::vector<HybridReport>& reports, const Schema& schema,
                                        const MatrixMap& matrices) {
  if (reports.empty()) throw EmptyInput("no reports to estimate from");
  const std::uint64_t n = reports.size();
  const auto numeric_idx = schema.numeric_indices();

  std::vector<double> numeric_sums(numeric_idx.size(), 0.0);
  std::map<std::size_t, std::vector<CategoricalReport>> cells;
  for (const auto& report : reports) {
    if (report.numeric_block.size() != numeric_idx.size()) {
      throw LengthMismatch("hybrid numeric block does not match the schema");
    }
    for (std::size_t i = 0; i < numeric_idx.size(); ++i) numeric_sums[i] += report.numeric_block[i];
    for (const auto& cell : report.cells) cells[cell.attr_index].push_back(cell);
  }

  AttributeEstimates out;
  for (std::size_t i = 0; i < numeric_idx.size(); ++i) {
    out.numeric_means[numeric_idx[i]] = numeric_sums[i] / static_cast<double>(n);
  }
  for (std::size_t j : schema.categorical_indices()) {
    const auto& matrix = matrix_for(matrices, j, schema);
    const auto it = cells.find(j);
    if (it == cells.end() || it->second.empty()) throw EmptyInput("hybrid reports missing a categorical attribute");
    out.categorical_freqs[j] = estimate_frequencies(it->second, matrix, n);
  }
  return out;
}

}  // namespace ldp
