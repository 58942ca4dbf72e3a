#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ldp/dataset.hpp"
#include "ldp/erm.hpp"
#include "ldp/multi.hpp"

namespace ldp {

enum class TaskKind { means_freqs, erm };

enum class FreqVariantChoice { automatic, orthogonal, random_projection };

// Plain-text key=value configuration for an experiment run. Unknown keys
// are rejected so typos fail loudly.
struct ExperimentConfig {
  TaskKind task = TaskKind::means_freqs;
  std::vector<std::string> methods;
  std::vector<double> epsilons = {0.05, 0.1, 0.2, 0.4, 0.8};
  std::size_t repetitions = 100;
  std::uint64_t seed = 1;
  std::string output;  // empty: caller-provided stream only
  bool timing = false;

  // Population: either a dataset CSV + schema, or a synthetic spec with n.
  std::string dataset_path;
  std::string schema_path;
  std::string synth;
  std::size_t n = 0;

  // Estimation knobs.
  double beta = 0.05;
  FreqVariantChoice freq_variant = FreqVariantChoice::automatic;
  bool clip = false;

  // Training knobs.
  LossKind loss = LossKind::linear;
  double lambda = 1e-4;
  std::size_t r = 20;
  std::size_t folds = 10;
  double stop_delta = 1e-6;
  std::string label;  // dataset mode: name of the attribute used as the label

  // Planted-model population (training task without a dataset).
  std::size_t erm_d = 40;
  double erm_beta_norm = 0.6;
  double erm_noise = 0.3;
};

ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig load_experiment_config(const std::string& path);

struct MetricsRecord {
  std::string method;
  std::string task;
  double epsilon = 0.0;
  std::size_t repetition = 0;
  std::string metric;
  double value = 0.0;
  double wall_time_s = 0.0;
};

// One JSON object per record, numbers at round-trip precision.
std::string to_json_line(const MetricsRecord& record);

// Mini-batch size rule: max(ceil(2 dim ln(dim) / eps^2), ceil(n/1000)),
// floored at 1.
std::size_t batch_size_rule(std::size_t dim, double epsilon, std::size_t n);

// Seeded shuffle followed by round-robin fold assignment; returns
// fold id per data index. Folds partition the data exactly.
std::vector<std::size_t> assign_folds(std::size_t n, std::size_t folds, RandomSource& rng);

// Population ground truth: per-attribute empirical means and frequencies,
// which is what the estimators target.
AttributeEstimates empirical_truth(const Schema& schema, const std::vector<UserTuple>& tuples);

// Runs the configured sweep and appends one metrics line per record to
// `out`, flushing after every line so partial results survive an abort.
void run_experiment(const ExperimentConfig& config, std::ostream& out);

}  // namespace ldp
