#include "ldp/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ldp {

namespace {

constexpr std::size_t kMaxOutcomes = 1000000;

std::string sign_char(int sign) { return sign > 0 ? "+" : "-"; }

void check_numeric_input(const UserTuple& input, std::size_t d) {
  if (input.size() != d) throw LengthMismatch("audit input length does not match the mechanism");
  for (double v : input.values) {
    if (!(v >= -1.0 && v <= 1.0)) throw DomainViolation("audit input outside [-1,1]");
  }
}

OutcomeDistribution enumerate_onebit(std::size_t d, const UserTuple& input, double epsilon) {
  check_numeric_input(input, d);
  if (2 * d > kMaxOutcomes) throw TooLarge("output space exceeds the enumeration limit");
  const double e = std::exp(epsilon);
  const double magnitude = static_cast<double>(d) * (e + 1.0) / (e - 1.0);

  OutcomeDistribution dist;
  for (std::size_t j = 0; j < d; ++j) {
    const double p_plus = (input[j] * (e - 1.0) + e + 1.0) / (2.0 * e + 2.0);
    for (int sign : {+1, -1}) {
      Outcome o;
      o.label = "j=" + std::to_string(j) + ":" + sign_char(sign);
      o.probability = (sign > 0 ? p_plus : 1.0 - p_plus) / static_cast<double>(d);
      o.decoded.assign(d, 0.0);
      o.decoded[j] = sign * magnitude;
      dist.outcomes.push_back(std::move(o));
    }
  }
  return dist;
}

OutcomeDistribution enumerate_duchi(std::size_t d, DuchiVariant variant, const UserTuple& input, double epsilon) {
  check_numeric_input(input, d);
  if (d > 20 || (std::size_t{1} << d) > kMaxOutcomes) throw TooLarge("output space exceeds the enumeration limit");
  const DuchiConstants k = duchi_constants(d, epsilon, variant);
  const std::size_t two_d = std::size_t{1} << d;

  // Sign conventions: bit j of a mask set means coordinate j is -1.
  auto mask_sign = [](std::size_t mask, std::size_t j) { return (mask >> j) & 1 ? -1 : +1; };

  std::vector<double> prob(two_d, 0.0);
  for (std::size_t vmask = 0; vmask < two_d; ++vmask) {
    double pv = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      pv *= 0.5 + 0.5 * mask_sign(vmask, j) * input[j];
    }
    if (pv == 0.0) continue;

    // Membership depends only on the number of agreeing coordinates.
    std::size_t plus_count = 0;
    for (std::size_t tmask = 0; tmask < two_d; ++tmask) {
      std::size_t agree = 0;
      for (std::size_t j = 0; j < d; ++j) agree += mask_sign(tmask, j) == mask_sign(vmask, j);
      plus_count += 2 * agree > d;
    }
    const std::size_t minus_count = two_d - plus_count;
    for (std::size_t tmask = 0; tmask < two_d; ++tmask) {
      std::size_t agree = 0;
      for (std::size_t j = 0; j < d; ++j) agree += mask_sign(tmask, j) == mask_sign(vmask, j);
      const bool in_plus = 2 * agree > d;
      prob[tmask] += pv * (in_plus ? k.p_plus / static_cast<double>(plus_count)
                                   : (1.0 - k.p_plus) / static_cast<double>(minus_count));
    }
  }

  OutcomeDistribution dist;
  for (std::size_t tmask = 0; tmask < two_d; ++tmask) {
    Outcome o;
    o.probability = prob[tmask];
    o.decoded.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      o.decoded[j] = mask_sign(tmask, j) * k.b;
      o.label += sign_char(mask_sign(tmask, j));
    }
    dist.outcomes.push_back(std::move(o));
  }
  return dist;
}

OutcomeDistribution enumerate_rr(const UserTuple& input, double epsilon) {
  if (input.size() != 1 || (input[0] != 1.0 && input[0] != -1.0)) {
    throw DomainViolation("randomized response audits a single value in {-1,+1}");
  }
  const double e = std::exp(epsilon);
  const double c = (e + 1.0) / (e - 1.0);
  const double p = e / (e + 1.0);

  OutcomeDistribution dist;
  for (int sign : {+1, -1}) {
    Outcome o;
    o.label = sign_char(sign);
    o.probability = (sign == (input[0] > 0 ? +1 : -1)) ? p : 1.0 - p;
    o.decoded = {sign * c};
    dist.outcomes.push_back(std::move(o));
  }
  return dist;
}

// Outcomes of the frequency oracle on one value: a row s and the sign of
// the released cell. Decoded entries are the estimator's column
// contributions alpha * entry(s, l) = sign * c_eps * sign(s, l).
OutcomeDistribution enumerate_frequency(const FrequencyMatrix& matrix, const UserTuple& input, double epsilon,
                                        double scale) {
  if (input.size() != 1) throw LengthMismatch("frequency oracle audits a single categorical value");
  const double raw = input[0];
  if (raw != std::floor(raw) || raw < 1.0 || raw > static_cast<double>(matrix.cols())) {
    throw DomainViolation("audit input not an integer in 1..k");
  }
  if (2 * matrix.rows() > kMaxOutcomes) throw TooLarge("output space exceeds the enumeration limit");
  const auto value = static_cast<std::uint64_t>(raw) - 1;
  const double e = std::exp(epsilon);
  const double c = (e + 1.0) / (e - 1.0);
  const double p = e / (e + 1.0);

  OutcomeDistribution dist;
  for (std::uint64_t s = 0; s < matrix.rows(); ++s) {
    const int cell_sign = matrix.sign(s, value);
    for (int alpha_sign : {+1, -1}) {
      Outcome o;
      o.label = "s=" + std::to_string(s) + ":" + sign_char(alpha_sign);
      o.probability = (alpha_sign == cell_sign ? p : 1.0 - p) / static_cast<double>(matrix.rows());
      o.decoded.resize(matrix.cols());
      for (std::uint64_t l = 0; l < matrix.cols(); ++l) {
        o.decoded[l] = scale * alpha_sign * c * matrix.sign(s, l);
      }
      dist.outcomes.push_back(std::move(o));
    }
  }
  return dist;
}

// Mixed-protocol outcomes. Decoded vectors are laid out attribute by
// attribute: one slot per numeric attribute, k slots per categorical one,
// so the expectation lines up with [means..., frequency indicators...].
OutcomeDistribution enumerate_multi(const Schema& schema, const MatrixMap& matrices, const UserTuple& input,
                                    double epsilon) {
  validate_tuple(schema, input);
  const std::size_t d = schema.size();
  const double e = std::exp(epsilon);
  const double c = (e + 1.0) / (e - 1.0);

  std::vector<std::size_t> offset(d);
  std::size_t width = 0;
  for (std::size_t j = 0; j < d; ++j) {
    offset[j] = width;
    width += schema.at(j).kind == AttrKind::numeric ? 1 : schema.at(j).k;
  }

  std::size_t outcome_count = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (schema.at(j).kind == AttrKind::numeric) {
      outcome_count += 2;
    } else {
      const auto it = matrices.find(j);
      if (it == matrices.end()) throw MissingMatrix("no frequency matrix registered for attribute index " +
                                                    std::to_string(j));
      outcome_count += 2 * it->second.rows();
    }
  }
  if (outcome_count > kMaxOutcomes) throw TooLarge("output space exceeds the enumeration limit");

  OutcomeDistribution dist;
  const double pick = 1.0 / static_cast<double>(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (schema.at(j).kind == AttrKind::numeric) {
      const double p_plus = (input[j] * (e - 1.0) + e + 1.0) / (2.0 * e + 2.0);
      for (int sign : {+1, -1}) {
        Outcome o;
        o.label = "A" + std::to_string(j) + ":N:" + sign_char(sign);
        o.probability = pick * (sign > 0 ? p_plus : 1.0 - p_plus);
        o.decoded.assign(width, 0.0);
        o.decoded[offset[j]] = sign * static_cast<double>(d) * c;
        dist.outcomes.push_back(std::move(o));
      }
    } else {
      const auto& matrix = matrices.at(j);
      UserTuple one({input[j]});
      auto sub = enumerate_frequency(matrix, one, epsilon, static_cast<double>(d));
      for (auto& o : sub.outcomes) {
        Outcome lifted;
        lifted.label = "A" + std::to_string(j) + ":C:" + o.label;
        lifted.probability = pick * o.probability;
        lifted.decoded.assign(width, 0.0);
        std::copy(o.decoded.begin(), o.decoded.end(), lifted.decoded.begin() + offset[j]);
        dist.outcomes.push_back(std::move(lifted));
      }
    }
  }
  return dist;
}

}  // namespace

AuditMechanism AuditMechanism::onebit(std::size_t d) {
  AuditMechanism m;
  m.family = Family::onebit;
  m.d = d;
  return m;
}

AuditMechanism AuditMechanism::duchi(std::size_t d, DuchiVariant variant) {
  AuditMechanism m;
  m.family = Family::duchi;
  m.d = d;
  m.variant = variant;
  return m;
}

AuditMechanism AuditMechanism::rr_binary() {
  AuditMechanism m;
  m.family = Family::rr_binary;
  m.d = 1;
  return m;
}

AuditMechanism AuditMechanism::frequency_oracle(FrequencyMatrix matrix) {
  AuditMechanism m;
  m.family = Family::frequency_oracle;
  m.matrix = std::move(matrix);
  return m;
}

AuditMechanism AuditMechanism::multi(Schema schema, MatrixMap matrices) {
  AuditMechanism m;
  m.family = Family::multi;
  m.schema = std::move(schema);
  m.matrices = std::move(matrices);
  m.d = m.schema.size();
  return m;
}

double OutcomeDistribution::total_mass() const {
  double mass = 0.0;
  for (const auto& o : outcomes) mass += o.probability;
  return mass;
}

OutcomeDistribution enumerate_distribution(const AuditMechanism& mechanism, const UserTuple& input, double epsilon) {
  PrivacyBudget check(epsilon);
  OutcomeDistribution dist;
  switch (mechanism.family) {
    case AuditMechanism::Family::onebit:
      dist = enumerate_onebit(mechanism.d, input, epsilon);
      break;
    case AuditMechanism::Family::duchi:
      dist = enumerate_duchi(mechanism.d, mechanism.variant, input, epsilon);
      break;
    case AuditMechanism::Family::rr_binary:
      dist = enumerate_rr(input, epsilon);
      break;
    case AuditMechanism::Family::frequency_oracle:
      dist = enumerate_frequency(*mechanism.matrix, input, epsilon, 1.0);
      break;
    case AuditMechanism::Family::multi:
      dist = enumerate_multi(mechanism.schema, mechanism.matrices, input, epsilon);
      break;
  }
  std::sort(dist.outcomes.begin(), dist.outcomes.end(),
            [](const Outcome& a, const Outcome& b) { return a.label < b.label; });
  return dist;
}

RatioReport max_ldp_ratio(const AuditMechanism& mechanism, const std::vector<UserTuple>& grid, double epsilon) {
  if (grid.empty()) throw EmptyInput("ratio sweep needs a nonempty input grid");

  std::vector<OutcomeDistribution> dists;
  dists.reserve(grid.size());
  for (const auto& input : grid) dists.push_back(enumerate_distribution(mechanism, input, epsilon));

  RatioReport report;
  report.ratio = 0.0;
  bool found = false;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = 0; b < grid.size(); ++b) {
      // Outcomes are label-sorted, and every family emits the same label
      // set for every input, so the lists walk in lockstep.
      const auto& da = dists[a].outcomes;
      const auto& db = dists[b].outcomes;
      if (da.size() != db.size()) throw LengthMismatch("outcome spaces differ between inputs");
      for (std::size_t i = 0; i < da.size(); ++i) {
        if (da[i].label != db[i].label) throw LengthMismatch("outcome labels differ between inputs");
        const double pa = da[i].probability;
        const double pb = db[i].probability;
        double ratio;
        if (pa == 0.0 && pb == 0.0) {
          ratio = 1.0;
        } else if (pb == 0.0) {
          ratio = std::numeric_limits<double>::infinity();
        } else {
          ratio = pa / pb;
        }
        if (!found || ratio > report.ratio) {
          found = true;
          report.ratio = ratio;
          report.witness_a = grid[a];
          report.witness_b = grid[b];
          report.witness_output = da[i].label;
        }
      }
    }
  }
  return report;
}

Moments exact_moments(const AuditMechanism& mechanism, const UserTuple& input, double epsilon) {
  const auto dist = enumerate_distribution(mechanism, input, epsilon);
  if (dist.outcomes.empty()) throw EmptyInput("no outcomes to take moments of");
  const std::size_t width = dist.outcomes.front().decoded.size();

  Moments m;
  m.mean.assign(width, 0.0);
  m.variance.assign(width, 0.0);
  for (const auto& o : dist.outcomes) {
    for (std::size_t i = 0; i < width; ++i) m.mean[i] += o.probability * o.decoded[i];
  }
  for (const auto& o : dist.outcomes) {
    for (std::size_t i = 0; i < width; ++i) {
      const double delta = o.decoded[i] - m.mean[i];
      m.variance[i] += o.probability * delta * delta;
    }
  }
  return m;
}

std::vector<UserTuple> corner_inputs(std::size_t d) {
  if (d > 20) throw TooLarge("corner grid exceeds the enumeration limit");
  std::vector<UserTuple> grid;
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    UserTuple t;
    t.values.resize(d);
    for (std::size_t j = 0; j < d; ++j) t.values[j] = (mask >> j) & 1 ? -1.0 : 1.0;
    grid.push_back(std::move(t));
  }
  return grid;
}

std::vector<UserTuple> lattice_inputs(std::size_t d) {
  static const double points[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  double count = std::pow(5.0, static_cast<double>(d));
  if (count > 1e6) throw TooLarge("lattice grid exceeds the enumeration limit");
  std::vector<UserTuple> grid;
  std::size_t total = static_cast<std::size_t>(count);
  for (std::size_t index = 0; index < total; ++index) {
    UserTuple t;
    t.values.resize(d);
    std::size_t rest = index;
    for (std::size_t j = 0; j < d; ++j) {
      t.values[j] = points[rest % 5];
      rest /= 5;
    }
    grid.push_back(std::move(t));
  }
  return grid;
}

std::vector<UserTuple> categorical_inputs(std::uint64_t k) {
  std::vector<UserTuple> grid;
  for (std::uint64_t v = 1; v <= k; ++v) grid.push_back(UserTuple({static_cast<double>(v)}));
  return grid;
}

std::vector<UserTuple> mixed_grid(const Schema& schema, const std::vector<double>& numeric_points) {
  std::vector<UserTuple> grid;
  grid.emplace_back();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    std::vector<double> values;
    if (schema.at(j).kind == AttrKind::numeric) {
      values = numeric_points;
    } else {
      for (std::uint64_t v = 1; v <= schema.at(j).k; ++v) values.push_back(static_cast<double>(v));
    }
    std::vector<UserTuple> next;
    next.reserve(grid.size() * values.size());
    for (const auto& prefix : grid) {
      for (double v : values) {
        UserTuple t = prefix;
        t.values.push_back(v);
        next.push_back(std::move(t));
      }
    }
    grid = std::move(next);
    if (grid.size() > 100000) throw TooLarge("mixed grid exceeds the enumeration limit");
  }
  return grid;
}

}  // namespace ldp
