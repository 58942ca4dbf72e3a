#include "ldp/numeric.hpp"

#include <cmath>

namespace ldp {

namespace {

void require_numeric_only(const UserTuple& tuple) {
  for (double v : tuple.values) {
    if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
      throw DomainViolation("numeric mechanism input must lie in [-1,1]");
    }
  }
}

}  // namespace

double rr_scale(double epsilon) {
  const double e = std::exp(epsilon);
  return (e + 1.0) / (e - 1.0);
}

void require_all_numeric(const Schema& schema) {
  for (const auto& attr : schema.attrs()) {
    if (attr.kind != AttrKind::numeric) {
      throw KindMismatch("attribute '" + attr.name + "' is categorical; this mechanism handles numeric tuples only");
    }
  }
}

std::uint64_t binomial_exact(std::uint64_t n, std::uint64_t k) {
  if (n > kDuchiMaxD) throw Overflow("binomial coefficients supported up to n = 64");
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) stays within 128 bits; the division is exact
    // because any prefix of the product formula is an integer binomial.
    const unsigned __int128 num = static_cast<unsigned __int128>(result) * (n - k + i);
    result = static_cast<std::uint64_t>(num / i);
  }
  return result;
}

DuchiConstants duchi_constants(std::size_t d, double epsilon, DuchiVariant variant) {
  if (d < 1) throw DegenerateParams("attribute count must be at least 1");
  if (d > kDuchiMaxD) throw Overflow("attribute count above the supported maximum of 64");
  PrivacyBudget check(epsilon);

  // C_d exactly in integers: 2^(d-1) for odd d, 2^(d-1) - C(d,d/2)/2 for
  // even d (the central binomial is even for every even d >= 2).
  std::uint64_t c_int;
  if (d % 2 == 1) {
    c_int = std::uint64_t{1} << (d - 1);
  } else {
    c_int = (std::uint64_t{1} << (d - 1)) - binomial_exact(d, d / 2) / 2;
  }

  const double e = std::exp(epsilon);
  const double two_d = std::ldexp(1.0, static_cast<int>(d));
  const std::uint64_t denom_binom =
      (d % 2 == 1) ? binomial_exact(d - 1, (d - 1) / 2) : binomial_exact(d - 1, d / 2);

  DuchiConstants out;
  out.d = d;
  out.variant = variant;
  out.c_d = static_cast<double>(c_int);
  out.b = (two_d + out.c_d * (e - 1.0)) / (static_cast<double>(denom_binom) * (e - 1.0));
  out.p_plus = (variant == DuchiVariant::original)
                   ? e / (e + 1.0)
                   : e * out.c_d / ((e - 1.0) * out.c_d + two_d);
  return out;
}

std::vector<double> laplace_perturb(const UserTuple& tuple, const PrivacyBudget& epsilon, RandomSource& rng) {
  require_numeric_only(tuple);
  const std::size_t d = tuple.size();
  if (d == 0) throw LengthMismatch("empty tuple");
  const double scale = 2.0 * static_cast<double>(d) / epsilon.epsilon();
  std::vector<double> out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = tuple[j] + rng.laplace(scale);
  return out;
}

namespace detail {

std::vector<double> sample_halfspace(const std::vector<int>& v, double b, bool plus, RandomSource& rng) {
  const std::size_t d = v.size();

  // Weights over the agreement count a: C(d, a), restricted to the strict
  // majority (plus) or its complement. Total mass is C_d or 2^d - C_d.
  const std::size_t lo = plus ? d / 2 + 1 : 0;
  const std::size_t hi = plus ? d : d / 2;
  double total = 0.0;
  for (std::size_t a = lo; a <= hi; ++a) total += static_cast<double>(binomial_exact(d, a));

  double target = rng.next_double() * total;
  std::size_t count = hi;
  for (std::size_t a = lo; a <= hi; ++a) {
    target -= static_cast<double>(binomial_exact(d, a));
    if (target < 0.0) {
      count = a;
      break;
    }
  }

  // Choose which `count` coordinates agree with v, uniformly over subsets.
  std::vector<double> out(d);
  std::size_t needed = count;
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t remaining = d - j;
    const bool agree = needed > 0 && rng.next_double() * static_cast<double>(remaining) < static_cast<double>(needed);
    if (agree) --needed;
    out[j] = (agree ? v[j] : -v[j]) * b;
  }
  return out;
}

}  // namespace detail

std::vector<double> duchi_perturb(const UserTuple& tuple, const PrivacyBudget& epsilon, DuchiVariant variant,
                                  RandomSource& rng) {
  require_numeric_only(tuple);
  const std::size_t d = tuple.size();
  if (d == 0) throw LengthMismatch("empty tuple");
  const DuchiConstants k = duchi_constants(d, epsilon.epsilon(), variant);

  std::vector<int> v(d);
  for (std::size_t j = 0; j < d; ++j) {
    v[j] = rng.bernoulli(0.5 + 0.5 * tuple[j]) ? 1 : -1;
  }
  const bool plus = rng.bernoulli(k.p_plus);
  return detail::sample_halfspace(v, k.b, plus, rng);
}

std::vector<double> laplace_perturb(const Schema& schema, const UserTuple& tuple, const PrivacyBudget& epsilon,
                                    RandomSource& rng) {
  require_all_numeric(schema);
  validate_tuple(schema, tuple);
  return laplace_perturb(tuple, epsilon, rng);
}

std::vector<double> duchi_perturb(const Schema& schema, const UserTuple& tuple, const PrivacyBudget& epsilon,
                                  DuchiVariant variant, RandomSource& rng) {
  require_all_numeric(schema);
  validate_tuple(schema, tuple);
  return duchi_perturb(tuple, epsilon, variant, rng);
}

NumericReport onebit_perturb(const Schema& schema, const UserTuple& tuple, const PrivacyBudget& epsilon,
                             RandomSource& rng) {
  require_all_numeric(schema);
  validate_tuple(schema, tuple);
  return onebit_perturb(tuple, epsilon, rng);
}

NumericReport onebit_perturb(const UserTuple& tuple, const PrivacyBudget& epsilon, RandomSource& rng) {
  require_numeric_only(tuple);
  const std::size_t d = tuple.size();
  if (d == 0) throw LengthMismatch("empty tuple");

  NumericReport report;
  report.d = d;
  report.epsilon = epsilon.epsilon();
  report.attr_index = static_cast<std::size_t>(rng.uniform_index(d));

  const double e = std::exp(epsilon.epsilon());
  const double p_plus = (tuple[report.attr_index] * (e - 1.0) + e + 1.0) / (2.0 * e + 2.0);
  report.sign = rng.bernoulli(p_plus) ? +1 : -1;
  return report;
}

std::vector<double> decode_numeric_report(const NumericReport& report) {
  if (report.d == 0 || report.attr_index >= report.d) throw LengthMismatch("malformed numeric report");
  std::vector<double> out(report.d, 0.0);
  out[report.attr_index] = report.sign * static_cast<double>(report.d) * rr_scale(report.epsilon);
  return out;
}

}  // namespace ldp
