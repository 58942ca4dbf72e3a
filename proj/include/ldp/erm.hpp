#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ldp/random.hpp"
#include "ldp/schema.hpp"

namespace ldp {

enum class LossKind { linear, logistic, hinge };

enum class TrainMode { private_sgd, mgd, mgd_dr, nonprivate_sgd };

struct TrainConfig {
  LossKind loss = LossKind::linear;
  TrainMode mode = TrainMode::mgd;
  double lambda = 1e-4;
  std::size_t r = 20;          // reduced dimension (mgd_dr)
  std::size_t g = 1;           // mini-batch size
  double epsilon = 1.0;
  std::size_t max_users = 0;   // 0: the full dataset
  double stop_delta = 1e-6;    // L-inf threshold on the applied update
  std::uint64_t reduction_seed = 0;
};

struct LabeledTuple {
  std::vector<double> x;
  double y = 0.0;
};

// Random r x d matrix with entries +/-1/d; any product with a unit-box
// vector stays in the unit box, which is what lets gradients feed the
// one-bit mechanism without further scaling.
class ReductionMatrix {
 public:
  ReductionMatrix(std::size_t r, std::size_t d, std::uint64_t seed);

  std::size_t r() const { return r_; }
  std::size_t d() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  double entry(std::size_t row, std::size_t col) const { return entries_[row * d_ + col]; }

 private:
  std::size_t r_;
  std::size_t d_;
  std::uint64_t seed_;
  std::vector<double> entries_;
};

std::vector<double> reduce_tuple(const ReductionMatrix& p, const std::vector<double>& x);

double loss_value(LossKind kind, const std::vector<double>& params, const std::vector<double>& x, double y,
                  double lambda);

// Gradient of loss + (lambda/2)|params|^2. The hinge subgradient at the
// kink uses the zero branch.
std::vector<double> loss_gradient(LossKind kind, const std::vector<double>& params, const std::vector<double>& x,
                                  double y, double lambda);

std::vector<double> clip_gradient(const std::vector<double>& grad);

struct ModelParams {
  std::vector<double> alpha;
};

struct TrainStats {
  std::size_t users_consumed = 0;
  std::size_t updates_applied = 0;
  // One perturbation per consumed user in the private modes; the audit of
  // the per-user budget hangs off this counter.
  std::size_t perturbations = 0;
  bool stopped_early = false;
};

struct TrainResult {
  ModelParams params;
  std::optional<ReductionMatrix> reduction;
  TrainStats stats;
};

// Mini-batch gradient descent over one pass of the data: each user
// contributes one (possibly perturbed) clipped gradient; every g users
// the averaged gradient is applied with step 1/sqrt(update index).
// nonprivate_sgd uses exact unclipped gradients with g = 1; private_sgd
// uses g = 1 with one-bit perturbation; mgd_dr first projects tuples to r
// dimensions (linear loss only).
TrainResult mgd_train(const std::vector<LabeledTuple>& data, const TrainConfig& config, RandomSource& rng);

// Test-set quality: mean squared error for the linear loss, else the
// misclassification rate of sign(x . alpha), with sign(0) counted as +1.
double evaluate(const ModelParams& params, const std::optional<ReductionMatrix>& reduction,
                const std::vector<LabeledTuple>& test, LossKind kind);

}  // namespace ldp
