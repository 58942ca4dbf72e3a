#pragma once

#include <cstdint>
#include <vector>

#include "ldp/random.hpp"
#include "ldp/schema.hpp"

namespace ldp {

// Scaling factor shared by the binary mechanisms: c_eps = (e^eps+1)/(e^eps-1).
double rr_scale(double epsilon);

enum class DuchiVariant { original, fixed };

// Constants for the {-B, B}^d mechanism. C_d counts the tuples lying on
// the positive side of any direction vector; B rescales the output so the
// estimator is unbiased.
struct DuchiConstants {
  std::size_t d = 0;
  double c_d = 0.0;
  double b = 0.0;
  DuchiVariant variant = DuchiVariant::fixed;
  double p_plus = 0.0;  // Pr[u = 1] under the variant
};

// Exact binomial coefficient in integer arithmetic; throws Overflow when
// the result would not fit or n exceeds the supported range.
std::uint64_t binomial_exact(std::uint64_t n, std::uint64_t k);

// The supported attribute-count ceiling for the {-B,B}^d mechanism; above
// this the exact integer binomials would overflow.
inline constexpr std::size_t kDuchiMaxD = 64;

DuchiConstants duchi_constants(std::size_t d, double epsilon, DuchiVariant variant = DuchiVariant::fixed);

// Throws KindMismatch unless every attribute in the schema is numeric.
void require_all_numeric(const Schema& schema);

// Adds Laplace(2d/eps) noise to every entry.
std::vector<double> laplace_perturb(const UserTuple& tuple, const PrivacyBudget& epsilon, RandomSource& rng);
std::vector<double> laplace_perturb(const Schema& schema, const UserTuple& tuple, const PrivacyBudget& epsilon,
                                    RandomSource& rng);

// The {-B, B}^d mechanism: draws a direction v biased by the input, then
// returns a uniform member of the halfspace selected by a Bernoulli coin.
// The original coin probability e^eps/(e^eps+1) breaks the privacy ratio
// for even d; the fixed variant's coin restores it.
std::vector<double> duchi_perturb(const UserTuple& tuple, const PrivacyBudget& epsilon, DuchiVariant variant,
                                  RandomSource& rng);
std::vector<double> duchi_perturb(const Schema& schema, const UserTuple& tuple, const PrivacyBudget& epsilon,
                                  DuchiVariant variant, RandomSource& rng);

// One-bit report: a uniformly chosen attribute index plus a sign whose
// bias encodes the attribute's value.
struct NumericReport {
  std::size_t attr_index = 0;  // 0-based
  int sign = +1;
  double epsilon = 0.0;
  std::size_t d = 0;
};

NumericReport onebit_perturb(const UserTuple& tuple, const PrivacyBudget& epsilon, RandomSource& rng);
NumericReport onebit_perturb(const Schema& schema, const UserTuple& tuple, const PrivacyBudget& epsilon,
                             RandomSource& rng);

// Expands a one-bit report to the d-vector it stands for: zero everywhere
// except entry attr_index, which is sign * d * c_eps.
std::vector<double> decode_numeric_report(const NumericReport& report);

namespace detail {
// Uniform sample from the set of sign vectors with agreement count a > d/2
// (plus = true) or a <= d/2 (plus = false) relative to v, scaled by b.
// Samples the count from the truncated binomial-coefficient weights, then
// the agreeing positions, so cost is O(d) rather than O(2^d).
std::vector<double> sample_halfspace(const std::vector<int>& v, double b, bool plus, RandomSource& rng);
}  // namespace detail

}  // namespace ldp
