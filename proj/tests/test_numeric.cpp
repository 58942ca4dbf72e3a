#include "doctest.h"

#include "ldp/numeric.hpp"
#include "ldp/random.hpp"

#include <cmath>
#include <sstream>

using ldp::DuchiVariant;
using ldp::PrivacyBudget;
using ldp::RandomSource;
using ldp::Schema;
using ldp::UserTuple;

namespace {

Schema numeric_schema(std::size_t d) {
  std::ostringstream text;
  for (std::size_t i = 0; i < d; ++i) text << "x" << i << ",numeric,-1,1\n";
  std::istringstream in(text.str());
  return Schema::parse(in);
}

}  // namespace

TEST_CASE("binomial_exact matches reference values") {
  CHECK(ldp::binomial_exact(0, 0) == 1);
  CHECK(ldp::binomial_exact(5, 2) == 10);
  CHECK(ldp::binomial_exact(10, 10) == 1);
  CHECK(ldp::binomial_exact(4, 5) == 0);
  CHECK(ldp::binomial_exact(64, 32) == 1832624140942590534ULL);
  CHECK_THROWS_AS(ldp::binomial_exact(65, 1), ldp::Overflow);
}

TEST_CASE("rr_scale is the two-point decoding constant") {
  const double e = std::exp(1.0);
  CHECK(ldp::rr_scale(1.0) == doctest::Approx(2.163953413738653).epsilon(1e-15));
  CHECK(ldp::rr_scale(1.0) == doctest::Approx((e + 1.0) / (e - 1.0)).epsilon(1e-15));
  // Scale shrinks toward 1 as the budget grows and blows up as it vanishes.
  CHECK(ldp::rr_scale(8.0) < ldp::rr_scale(1.0));
  CHECK(ldp::rr_scale(0.01) > 100.0);
}

TEST_CASE("duchi constants match hand-computed values at e^eps = 3") {
  const double eps = std::log(3.0);

  const auto k2 = ldp::duchi_constants(2, eps, DuchiVariant::fixed);
  CHECK(k2.c_d == 1.0);
  CHECK(k2.b == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(k2.p_plus == doctest::Approx(0.5).epsilon(1e-12));

  const auto k2o = ldp::duchi_constants(2, eps, DuchiVariant::original);
  CHECK(k2o.b == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(k2o.p_plus == doctest::Approx(0.75).epsilon(1e-12));

  const auto k3 = ldp::duchi_constants(3, eps, DuchiVariant::fixed);
  CHECK(k3.c_d == 4.0);
  CHECK(k3.b == doctest::Approx(4.0).epsilon(1e-12));

  const auto k4 = ldp::duchi_constants(4, eps, DuchiVariant::fixed);
  CHECK(k4.c_d == 5.0);
  CHECK(k4.b == doctest::Approx(13.0 / 3.0).epsilon(1e-12));

  const auto k6 = ldp::duchi_constants(6, eps, DuchiVariant::fixed);
  CHECK(k6.c_d == 22.0);
}

TEST_CASE("for odd dimensions both duchi coins coincide") {
  for (std::size_t d : {1, 3, 5, 7, 9}) {
    for (double eps : {0.1, 1.0, 4.0}) {
      const auto orig = ldp::duchi_constants(d, eps, DuchiVariant::original);
      const auto fixd = ldp::duchi_constants(d, eps, DuchiVariant::fixed);
      CHECK(orig.p_plus == doctest::Approx(fixd.p_plus).epsilon(1e-14));
      CHECK(orig.b == doctest::Approx(fixd.b).epsilon(1e-14));
      CHECK(orig.p_plus == doctest::Approx(std::exp(eps) / (std::exp(eps) + 1.0)).epsilon(1e-14));
    }
  }
  // With an even dimension the corrected coin differs from the naive one.
  const auto orig2 = ldp::duchi_constants(2, 1.0, DuchiVariant::original);
  const auto fixd2 = ldp::duchi_constants(2, 1.0, DuchiVariant::fixed);
  CHECK(orig2.p_plus != fixd2.p_plus);
}

TEST_CASE("single-attribute duchi reduces to two-point response") {
  const auto k = ldp::duchi_constants(1, 1.0, DuchiVariant::fixed);
  CHECK(k.b == doctest::Approx(ldp::rr_scale(1.0)).epsilon(1e-14));
  CHECK(k.c_d == 1.0);
}

TEST_CASE("duchi constants reject degenerate setups") {
  CHECK_THROWS_AS(ldp::duchi_constants(0, 1.0, DuchiVariant::fixed), ldp::DegenerateParams);
  CHECK_THROWS_AS(ldp::duchi_constants(65, 1.0, DuchiVariant::fixed), ldp::Overflow);
  CHECK_THROWS_AS(ldp::duchi_constants(2, 0.0, DuchiVariant::fixed), ldp::DomainViolation);
  CHECK_THROWS_AS(ldp::duchi_constants(2, -1.0, DuchiVariant::fixed), ldp::DomainViolation);
}

TEST_CASE("duchi outputs live on the scaled hypercube") {
  RandomSource rng(101);
  const UserTuple t({0.3, -0.7, 0.0});
  const auto k = ldp::duchi_constants(3, 1.0, DuchiVariant::fixed);
  for (int i = 0; i < 500; ++i) {
    const auto out = ldp::duchi_perturb(t, PrivacyBudget(1.0), DuchiVariant::fixed, rng);
    REQUIRE(out.size() == 3);
    for (double v : out) CHECK(std::abs(v) == doctest::Approx(k.b).epsilon(1e-12));
  }
}

TEST_CASE("duchi fixed variant is unbiased in the mean") {
  RandomSource rng(202);
  const UserTuple t({0.5, -0.3});
  const int n = 400000;
  double s0 = 0.0, s1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto out = ldp::duchi_perturb(t, PrivacyBudget(1.0), DuchiVariant::fixed, rng);
    s0 += out[0];
    s1 += out[1];
  }
  // b is about 4.25 here, so the standard error of each mean is about 0.007.
  CHECK(std::abs(s0 / n - 0.5) < 0.03);
  CHECK(std::abs(s1 / n + 0.3) < 0.03);
}

TEST_CASE("one-bit reports decode to a single scaled coordinate") {
  RandomSource rng(303);
  const UserTuple t({0.2, -0.9, 0.6, 0.0});
  for (int i = 0; i < 500; ++i) {
    const auto rep = ldp::onebit_perturb(t, PrivacyBudget(0.7), rng);
    CHECK(rep.d == 4);
    CHECK(rep.attr_index < 4);
    CHECK((rep.sign == 1 || rep.sign == -1));
    const auto dec = ldp::decode_numeric_report(rep);
    REQUIRE(dec.size() == 4);
    int nonzero = 0;
    for (std::size_t j = 0; j < dec.size(); ++j) {
      if (dec[j] != 0.0) {
        ++nonzero;
        CHECK(j == rep.attr_index);
        CHECK(std::abs(dec[j]) == doctest::Approx(4.0 * ldp::rr_scale(0.7)).epsilon(1e-12));
      }
    }
    CHECK(nonzero == 1);
  }
}

TEST_CASE("one-bit decoding averages back to the input") {
  RandomSource rng(404);
  const UserTuple t({0.4, -0.6});
  const int n = 400000;
  double s0 = 0.0, s1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto dec = ldp::decode_numeric_report(ldp::onebit_perturb(t, PrivacyBudget(1.0), rng));
    s0 += dec[0];
    s1 += dec[1];
  }
  // Per-coordinate variance is d * scale^2, about 9.4, so the standard
  // error of each mean is about 0.005.
  CHECK(std::abs(s0 / n - 0.4) < 0.025);
  CHECK(std::abs(s1 / n + 0.6) < 0.025);
}

TEST_CASE("laplace perturbation adds centered noise of the right spread") {
  RandomSource rng(505);
  const UserTuple t({0.25, -0.5});
  const double eps = 2.0;
  const int n = 200000;
  double s0 = 0.0, sq0 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto out = ldp::laplace_perturb(t, PrivacyBudget(eps), rng);
    s0 += out[0];
    sq0 += (out[0] - 0.25) * (out[0] - 0.25);
  }
  const double scale = 2.0 * 2.0 / eps;
  CHECK(std::abs(s0 / n - 0.25) < 0.025);
  CHECK(sq0 / n == doctest::Approx(2.0 * scale * scale).epsilon(0.05));
}

TEST_CASE("numeric mechanisms validate their inputs") {
  RandomSource rng(606);
  CHECK_THROWS_AS(ldp::laplace_perturb(UserTuple({1.5}), PrivacyBudget(1.0), rng), ldp::DomainViolation);
  CHECK_THROWS_AS(ldp::laplace_perturb(UserTuple(std::vector<double>{}), PrivacyBudget(1.0), rng),
                  ldp::LengthMismatch);
  CHECK_THROWS_AS(ldp::onebit_perturb(UserTuple({-2.0}), PrivacyBudget(1.0), rng), ldp::DomainViolation);
  CHECK_THROWS_AS(ldp::duchi_perturb(UserTuple({0.0, 3.0}), PrivacyBudget(1.0), DuchiVariant::fixed, rng),
                  ldp::DomainViolation);

  std::istringstream mixed("a,numeric,0,1\nb,categorical,3\n");
  const Schema s = Schema::parse(mixed);
  CHECK_THROWS_AS(ldp::onebit_perturb(s, UserTuple({0.0, 1.0}), PrivacyBudget(1.0), rng), ldp::KindMismatch);
  CHECK_THROWS_AS(ldp::require_all_numeric(s), ldp::KindMismatch);
  CHECK_NOTHROW(ldp::require_all_numeric(numeric_schema(3)));
}

TEST_CASE("decode rejects malformed reports") {
  ldp::NumericReport bad;
  bad.d = 0;
  bad.attr_index = 0;
  bad.sign = 1;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(ldp::decode_numeric_report(bad), ldp::LengthMismatch);
  bad.d = 2;
  bad.attr_index = 2;
  CHECK_THROWS_AS(ldp::decode_numeric_report(bad), ldp::LengthMismatch);
}
