#include "doctest.h"

#include "ldp/frequency.hpp"
#include "ldp/numeric.hpp"
#include "ldp/random.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

using ldp::CategoricalReport;
using ldp::FrequencyMatrix;
using ldp::PrivacyBudget;
using ldp::RandomSource;

TEST_CASE("projection parameters match the closed form") {
  const auto p = ldp::bs_params(2, 10000, 1.0, 0.05);
  CHECK(p.gamma == doctest::Approx(0.02093329079402921).epsilon(1e-15));
  CHECK(p.m == 9249);

  // gamma = sqrt(ln(2k/beta) / (eps^2 n)), m = ceil(ln(k+1) ln(2/beta) / gamma^2).
  const auto q = ldp::bs_params(16, 50000, 0.5, 0.1);
  const double gamma = std::sqrt(std::log(2.0 * 16 / 0.1) / (0.5 * 0.5 * 50000));
  CHECK(q.gamma == doctest::Approx(gamma).epsilon(1e-14));
  CHECK(q.m == static_cast<std::uint64_t>(std::ceil(std::log(17.0) * std::log(20.0) / (gamma * gamma))));
}

TEST_CASE("projection parameters reject degenerate inputs") {
  CHECK_THROWS_AS(ldp::bs_params(1, 100, 1.0, 0.05), ldp::DegenerateParams);
  CHECK_THROWS_AS(ldp::bs_params(2, 0, 1.0, 0.05), ldp::DegenerateParams);
  CHECK_THROWS_AS(ldp::bs_params(2, 100, 1.0, 0.0), ldp::DegenerateParams);
  CHECK_THROWS_AS(ldp::bs_params(2, 100, 1.0, 1.0), ldp::DegenerateParams);
  CHECK_THROWS_AS(ldp::bs_params(2, 100, 0.0, 0.05), ldp::DomainViolation);
}

TEST_CASE("orthogonal columns match the literal doubling construction") {
  // Doubling: each parent column v expands to [v;v] then [v;-v], starting
  // from the single column [1]. Columns built that way must agree with the
  // closed-form signs entry by entry.
  std::vector<std::vector<int>> cols = {{1}};
  for (std::uint64_t rows = 2; rows <= 64; rows *= 2) {
    std::vector<std::vector<int>> next;
    next.reserve(cols.size() * 2);
    for (const auto& v : cols) {
      std::vector<int> same(v), flip(v);
      for (int x : v) same.push_back(x);
      for (int x : v) flip.push_back(-x);
      next.push_back(std::move(same));
      next.push_back(std::move(flip));
    }
    cols = std::move(next);

    const auto matrix = FrequencyMatrix::orthogonal(rows);
    REQUIRE(matrix.rows() == rows);
    REQUIRE(matrix.cols() == rows);
    for (std::uint64_t c = 0; c < rows; ++c) {
      for (std::uint64_t r = 0; r < rows; ++r) {
        CHECK(matrix.sign(r, c) == cols[c][r]);
      }
    }
  }
}

TEST_CASE("orthogonal matrix rounds k up to a power of two") {
  const auto m = FrequencyMatrix::orthogonal(5);
  CHECK(m.rows() == 8);
  CHECK(m.cols() == 5);
  CHECK(FrequencyMatrix::orthogonal(2).rows() == 2);
  CHECK(FrequencyMatrix::orthogonal(64).rows() == 64);
  CHECK(FrequencyMatrix::orthogonal(65).rows() == 128);
}

TEST_CASE("orthogonal column zero is all ones and columns are orthogonal") {
  const auto m = FrequencyMatrix::orthogonal(13);
  for (std::uint64_t r = 0; r < m.rows(); ++r) CHECK(m.sign(r, 0) == 1);
  for (std::uint64_t a = 0; a < m.cols(); ++a) {
    for (std::uint64_t b = 0; b < m.cols(); ++b) {
      if (a == b) {
        CHECK(m.column_dot_raw(a, b) == static_cast<std::int64_t>(m.rows()));
        CHECK(m.column_dot(a, b) == 1.0);
      } else {
        CHECK(m.column_dot_raw(a, b) == 0);
        CHECK(m.column_dot(a, b) == 0.0);
      }
    }
  }
}

TEST_CASE("orthogonal construction refuses oversized alphabets") {
  CHECK_THROWS_AS(FrequencyMatrix::orthogonal((std::uint64_t{1} << 20) + 1), ldp::Overflow);
  CHECK_THROWS_AS(FrequencyMatrix::orthogonal(1), ldp::DegenerateParams);
  CHECK_NOTHROW(FrequencyMatrix::orthogonal(std::uint64_t{1} << 20));
}

TEST_CASE("random projection entries are reproducible signs") {
  const auto a = FrequencyMatrix::random_projection(16, 5, 99);
  const auto b = FrequencyMatrix::random_projection(16, 5, 99);
  const auto c = FrequencyMatrix::random_projection(16, 5, 100);
  int differs = 0;
  for (std::uint64_t r = 0; r < 16; ++r) {
    for (std::uint64_t col = 0; col < 5; ++col) {
      CHECK((a.sign(r, col) == 1 || a.sign(r, col) == -1));
      CHECK(a.sign(r, col) == b.sign(r, col));
      CHECK(a.entry(r, col) == a.sign(r, col) / 4.0);
      differs += a.sign(r, col) != c.sign(r, col);
    }
  }
  CHECK(differs > 10);  // a different seed changes most entries
  CHECK(a.column_dot(2, 2) == 1.0);
  CHECK(a.column_dot_raw(2, 2) == 16);
  CHECK_THROWS_AS(FrequencyMatrix::random_projection(0, 3, 1), ldp::DegenerateParams);
  CHECK_THROWS_AS(a.sign(16, 0), ldp::LengthMismatch);
  CHECK_THROWS_AS(a.sign(0, 5), ldp::LengthMismatch);
}

TEST_CASE("binary randomized response keeps the value with the right odds") {
  RandomSource rng(71);
  const double eps = std::log(3.0);
  const double c = ldp::rr_scale(eps);  // 2 at e^eps = 3
  CHECK(c == doctest::Approx(2.0).epsilon(1e-14));
  int kept = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double out = ldp::rr_binary_perturb(1.0, PrivacyBudget(eps), rng);
    CHECK(std::abs(out) == doctest::Approx(c).epsilon(1e-14));
    kept += out > 0.0;
  }
  CHECK(kept / static_cast<double>(n) == doctest::Approx(0.75).epsilon(0.02));

  CHECK_THROWS_AS(ldp::rr_binary_perturb(0.5, PrivacyBudget(1.0), rng), ldp::DomainViolation);
  CHECK_THROWS_AS(ldp::rr_binary_perturb(0.0, PrivacyBudget(1.0), rng), ldp::DomainViolation);
}

TEST_CASE("frequency reports carry one scaled cell") {
  const auto m = FrequencyMatrix::orthogonal(4);
  RandomSource rng(72);
  const double c = ldp::rr_scale(1.0);
  for (int i = 0; i < 300; ++i) {
    const auto rep = ldp::bs_perturb(3, m, PrivacyBudget(1.0), rng);
    CHECK(rep.s < m.rows());
    // |alpha| = c * rows * |entry| = c * sqrt(rows)
    CHECK(std::abs(rep.alpha) == doctest::Approx(c * 2.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(ldp::bs_perturb(0, m, PrivacyBudget(1.0), rng), ldp::DomainViolation);
  CHECK_THROWS_AS(ldp::bs_perturb(5, m, PrivacyBudget(1.0), rng), ldp::DomainViolation);
}

TEST_CASE("per-report estimator contribution is exactly unbiased") {
  // Enumerate every (row, coin) outcome of a report on value v and check
  // that the expected per-user contribution to column l is the indicator
  // of l == v-1. The coin keeps the true cell with probability e/(e+1).
  const auto m = FrequencyMatrix::orthogonal(4);
  const double eps = 0.9;
  const double e = std::exp(eps);
  const double p_keep = e / (e + 1.0);
  const double c = ldp::rr_scale(eps);
  for (std::uint64_t v = 1; v <= 4; ++v) {
    for (std::uint64_t l = 0; l < 4; ++l) {
      double expected = 0.0;
      for (std::uint64_t s = 0; s < m.rows(); ++s) {
        const double cell = c * static_cast<double>(m.rows()) * m.entry(s, v - 1);
        const double contribution_plus = cell * m.entry(s, l);
        expected += (1.0 / static_cast<double>(m.rows())) *
                    (p_keep * contribution_plus + (1.0 - p_keep) * -contribution_plus);
      }
      const double want = (l == v - 1) ? 1.0 : 0.0;
      CHECK(std::abs(expected - want) < 1e-12);
    }
  }
}

TEST_CASE("frequency estimates recover a skewed distribution") {
  const auto m = FrequencyMatrix::orthogonal(4);
  RandomSource rng(73);
  const std::uint64_t n = 60000;
  const double truth[4] = {0.5, 0.3, 0.2, 0.0};
  std::vector<CategoricalReport> reports;
  reports.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double roll = rng.next_double();
    const std::uint64_t value = roll < 0.5 ? 1 : roll < 0.8 ? 2 : 3;
    reports.push_back(ldp::bs_perturb(value, m, PrivacyBudget(1.0), rng));
  }
  const auto est = ldp::estimate_frequencies(reports, m, n);
  REQUIRE(est.size() == 4);
  for (int l = 0; l < 4; ++l) CHECK(std::abs(est[l] - truth[l]) < 0.05);

  const auto clipped = ldp::clip_frequencies(est);
  double total = 0.0;
  for (double f : clipped) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    total += f;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("estimation rejects empty and oversized inputs") {
  const auto m = FrequencyMatrix::orthogonal(4);
  CHECK_THROWS_AS(ldp::estimate_frequencies({}, m, 10), ldp::EmptyInput);

  std::vector<CategoricalReport> one(1);
  one[0].s = 0;
  one[0].alpha = 1.0;
  CHECK_THROWS_AS(ldp::estimate_frequencies(one, m, 0), ldp::EmptyInput);

  one[0].s = 4;  // outside the 4-row matrix
  CHECK_THROWS_AS(ldp::estimate_frequencies(one, m, 10), ldp::LengthMismatch);

  const auto huge = FrequencyMatrix::random_projection((std::uint64_t{1} << 31) + 1, 2, 1);
  one[0].s = 0;
  CHECK_THROWS_AS(ldp::estimate_frequencies(one, huge, 10), ldp::TooLarge);
}

TEST_CASE("clipping clamps then renormalizes") {
  const auto out = ldp::clip_frequencies({-0.2, 0.5, 0.9});
  REQUIRE(out.size() == 3);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == doctest::Approx(0.5 / 1.4).epsilon(1e-14));
  CHECK(out[2] == doctest::Approx(0.9 / 1.4).epsilon(1e-14));

  // Already a distribution: unchanged.
  const auto same = ldp::clip_frequencies({0.25, 0.75});
  CHECK(same[0] == 0.25);
  CHECK(same[1] == 0.75);

  // Nothing positive: stays all zero rather than dividing by zero.
  const auto zeros = ldp::clip_frequencies({-0.5, -0.1, 0.0});
  for (double f : zeros) CHECK(f == 0.0);

  CHECK_THROWS_AS(ldp::clip_frequencies({}), ldp::EmptyInput);
}
