#include "ldp/erm.hpp"

#include <cmath>

#include "ldp/numeric.hpp"

namespace ldp {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_label(LossKind kind, double y) {
  if (kind == LossKind::linear) {
    if (!(y >= -1.0 && y <= 1.0)) throw DomainViolation("linear loss needs y in [-1,1]");
  } else {
    if (y != 1.0 && y != -1.0) throw DomainViolation("classification losses need y in {-1,+1}");
  }
}

}  // namespace

ReductionMatrix::ReductionMatrix(std::size_t r, std::size_t d, std::uint64_t seed) : r_(r), d_(d), seed_(seed) {
  if (r < 1 || r > d) throw DegenerateParams("reduction needs 1 <= r <= d");
  entries_.resize(r * d);
  const double magnitude = 1.0 / static_cast<double>(d);
  for (std::size_t row = 0; row < r; ++row) {
    for (std::size_t col = 0; col < d; ++col) {
      entries_[row * d + col] = (cell_hash(seed, row, col) >> 63) ? -magnitude : magnitude;
    }
  }
}

std::vector<double> reduce_tuple(const ReductionMatrix& p, const std::vector<double>& x) {
  if (x.size() != p.d()) throw LengthMismatch("tuple length does not match the reduction matrix");
  std::vector<double> out(p.r(), 0.0);
  for (std::size_t row = 0; row < p.r(); ++row) {
    double s = 0.0;
    for (std::size_t col = 0; col < p.d(); ++col) s += p.entry(row, col) * x[col];
    out[row] = s;
  }
  return out;
}

double loss_value(LossKind kind, const std::vector<double>& params, const std::vector<double>& x, double y,
                  double lambda) {
  if (x.size() != params.size()) throw LengthMismatch("feature and parameter lengths differ");
  check_label(kind, y);
  const double margin = dot(x, params);
  double base = 0.0;
  switch (kind) {
    case LossKind::linear:
      base = (margin - y) * (margin - y);
      break;
    case LossKind::logistic:
      base = std::log1p(std::exp(-y * margin));
      break;
    case LossKind::hinge:
      base = std::max(0.0, 1.0 - y * margin);
      break;
  }
  return base + 0.5 * lambda * dot(params, params);
}

std::vector<double> loss_gradient(LossKind kind, const std::vector<double>& params, const std::vector<double>& x,
                                  double y, double lambda) {
  if (x.size() != params.size()) throw LengthMismatch("feature and parameter lengths differ");
  check_label(kind, y);
  const double margin = dot(x, params);
  std::vector<double> grad(params.size());

  double factor = 0.0;
  switch (kind) {
    case LossKind::linear:
      factor = 2.0 * (margin - y);
      break;
    case LossKind::logistic:
      // d/dm log(1 + e^(-y m)) = -y / (1 + e^(y m))
      factor = -y / (1.0 + std::exp(y * margin));
      break;
    case LossKind::hinge:
      factor = (y * margin < 1.0) ? -y : 0.0;
      break;
  }
  for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = factor * x[i] + lambda * params[i];
  return grad;
}

std::vector<double> clip_gradient(const std::vector<double>& grad) {
  std::vector<double> out(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) out[i] = std::min(1.0, std::max(-1.0, grad[i]));
  return out;
}

TrainResult mgd_train(const std::vector<LabeledTuple>& data, const TrainConfig& config, RandomSource& rng) {
  if (data.empty()) throw InsufficientData("no training data");
  const std::size_t d = data.front().x.size();
  if (d == 0) throw LengthMismatch("empty feature vectors");

  const bool reduce = config.mode == TrainMode::mgd_dr;
  if (reduce && config.loss != LossKind::linear) {
    throw SpecError("dimension reduction applies to the linear loss only");
  }
  const bool is_private = config.mode == TrainMode::private_sgd || config.mode == TrainMode::mgd ||
                          config.mode == TrainMode::mgd_dr;
  const std::size_t g =
      (config.mode == TrainMode::private_sgd || config.mode == TrainMode::nonprivate_sgd) ? 1 : config.g;
  if (g < 1) throw DegenerateParams("mini-batch size must be at least 1");
  if (data.size() < g) throw InsufficientData("fewer users than one mini-batch");
  if (!(config.stop_delta > 0.0)) throw DegenerateParams("stop threshold must be positive");
  const PrivacyBudget budget(config.epsilon);

  TrainResult result;
  if (reduce) result.reduction.emplace(config.r, d, config.reduction_seed);
  const std::size_t dim = reduce ? config.r : d;
  result.params.alpha.assign(dim, 0.0);

  const std::size_t limit =
      config.max_users == 0 ? data.size() : std::min(config.max_users, data.size());

  std::vector<double> accum(dim, 0.0);
  std::size_t in_batch = 0;
  for (std::size_t i = 0; i < limit; ++i) {
    const auto& user = data[i];
    if (user.x.size() != d) throw LengthMismatch("inconsistent feature lengths in the training data");

    std::vector<double> features = reduce ? reduce_tuple(*result.reduction, user.x) : user.x;
    std::vector<double> grad = loss_gradient(config.loss, result.params.alpha, features, user.y, config.lambda);
    if (is_private) {
      grad = clip_gradient(grad);
      const NumericReport report = onebit_perturb(UserTuple(std::move(grad)), budget, rng);
      grad = decode_numeric_report(report);
      ++result.stats.perturbations;
    }
    for (std::size_t j = 0; j < dim; ++j) accum[j] += grad[j];
    ++result.stats.users_consumed;
    ++in_batch;

    if (in_batch == g) {
      const double k = static_cast<double>(result.stats.users_consumed);
      const double gamma = 1.0 / std::sqrt(k / static_cast<double>(g));
      double largest_step = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double step = gamma * accum[j] / static_cast<double>(g);
        result.params.alpha[j] -= step;
        largest_step = std::max(largest_step, std::abs(step));
        accum[j] = 0.0;
      }
      in_batch = 0;
      ++result.stats.updates_applied;
      if (largest_step < config.stop_delta) {
        result.stats.stopped_early = true;
        break;
      }
    }
  }
  return result;
}

double evaluate(const ModelParams& params, const std::optional<ReductionMatrix>& reduction,
                const std::vector<LabeledTuple>& test, LossKind kind) {
  if (test.empty()) throw EmptyInput("empty test set");
  double total = 0.0;
  for (const auto& user : test) {
    const std::vector<double> features = reduction ? reduce_tuple(*reduction, user.x) : user.x;
    if (features.size() != params.alpha.size()) throw LengthMismatch("feature and parameter lengths differ");
    double score = 0.0;
    for (std::size_t j = 0; j < features.size(); ++j) score += features[j] * params.alpha[j];
    if (kind == LossKind::linear) {
      total += (score - user.y) * (score - user.y);
    } else {
      const double predicted = score >= 0.0 ? 1.0 : -1.0;
      total += predicted != user.y ? 1.0 : 0.0;
    }
  }
  return total / static_cast<double>(test.size());
}

}  // namespace ldp
