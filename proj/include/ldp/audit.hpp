#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ldp/multi.hpp"

namespace ldp {

// Which mechanism the auditor reasons about. Built through the factories
// so each family carries exactly the context it needs.
struct AuditMechanism {
  enum class Family { onebit, duchi, rr_binary, frequency_oracle, multi };

  Family family = Family::onebit;
  std::size_t d = 1;                             // onebit, duchi
  DuchiVariant variant = DuchiVariant::fixed;    // duchi
  std::optional<FrequencyMatrix> matrix;         // frequency_oracle
  Schema schema;                                 // multi
  MatrixMap matrices;                            // multi

  static AuditMechanism onebit(std::size_t d);
  static AuditMechanism duchi(std::size_t d, DuchiVariant variant);
  static AuditMechanism rr_binary();
  static AuditMechanism frequency_oracle(FrequencyMatrix matrix);
  static AuditMechanism multi(Schema schema, MatrixMap matrices);
};

// One possible output: a label naming the observable report (stable
// across inputs, so distributions from different inputs can be compared
// outcome by outcome), its exact probability, and the decoded value the
// estimator would derive from it.
struct Outcome {
  std::string label;
  double probability = 0.0;
  std::vector<double> decoded;
};

struct OutcomeDistribution {
  std::vector<Outcome> outcomes;
  double total_mass() const;
};

// Exact analytic output distribution; no sampling anywhere. Outcomes are
// ordered by label. Throws TooLarge when the output space exceeds 10^6.
OutcomeDistribution enumerate_distribution(const AuditMechanism& mechanism, const UserTuple& input, double epsilon);

struct RatioReport {
  double ratio = 1.0;  // +infinity when some output is possible under one input only
  UserTuple witness_a;
  UserTuple witness_b;
  std::string witness_output;
};

// Supremum of Pr[output | a] / Pr[output | b] over all ordered input
// pairs from the grid and all outputs. 0/0 counts as 1; p/0 with p > 0 is
// infinity. The first witness attaining the supremum is kept.
RatioReport max_ldp_ratio(const AuditMechanism& mechanism, const std::vector<UserTuple>& grid, double epsilon);

struct Moments {
  std::vector<double> mean;
  std::vector<double> variance;
};

// Exact mean and per-entry variance of the decoded report.
Moments exact_moments(const AuditMechanism& mechanism, const UserTuple& input, double epsilon);

// Input grids for the ratio sweep.
std::vector<UserTuple> corner_inputs(std::size_t d);
std::vector<UserTuple> lattice_inputs(std::size_t d);  // {-1,-1/2,0,1/2,1}^d
std::vector<UserTuple> categorical_inputs(std::uint64_t k);
// Product grid over a mixed schema: the given points per numeric
// attribute, all k values per categorical attribute.
std::vector<UserTuple> mixed_grid(const Schema& schema, const std::vector<double>& numeric_points);

}  // namespace ldp
