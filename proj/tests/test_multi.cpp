#include "doctest.h"

#include "ldp/multi.hpp"
#include "ldp/random.hpp"

#include <cmath>
#include <sstream>
#include <variant>

using ldp::AttrKind;
using ldp::CategoricalReport;
using ldp::FrequencyMatrix;
using ldp::MatrixMap;
using ldp::MultiReport;
using ldp::NumericReport;
using ldp::PrivacyBudget;
using ldp::RandomSource;
using ldp::Schema;
using ldp::UserTuple;

namespace {

Schema mixed_schema() {
  std::istringstream in("x,numeric,-1,1\nc,categorical,2\n");
  return Schema::parse(in);
}

MatrixMap orthogonal_matrices(const Schema& schema) {
  MatrixMap m;
  for (std::size_t j : schema.categorical_indices()) {
    m.emplace(j, FrequencyMatrix::orthogonal(schema.at(j).k));
  }
  return m;
}

}  // namespace

TEST_CASE("uniform-pick reports cover one attribute at full scale") {
  const Schema schema = mixed_schema();
  const auto matrices = orthogonal_matrices(schema);
  RandomSource rng(81);
  bool saw_numeric = false, saw_categorical = false;
  for (int i = 0; i < 200; ++i) {
    const auto rep = ldp::multi_perturb(UserTuple({0.5, 2.0}), schema, PrivacyBudget(1.0), matrices, rng);
    CHECK(rep.attr_index < 2);
    CHECK(rep.scale == 2);
    if (schema.at(rep.attr_index).kind == AttrKind::numeric) {
      saw_numeric = true;
      const auto& bit = std::get<NumericReport>(rep.payload);
      CHECK(bit.d == 2);
      CHECK(bit.attr_index == rep.attr_index);
    } else {
      saw_categorical = true;
      const auto& cell = std::get<CategoricalReport>(rep.payload);
      CHECK(cell.attr_index == rep.attr_index);
      CHECK(cell.s < 2);
    }
  }
  CHECK(saw_numeric);
  CHECK(saw_categorical);
}

TEST_CASE("with a single numeric attribute the protocol is the one-bit mechanism") {
  std::istringstream in("x,numeric,-1,1\n");
  const Schema schema = Schema::parse(in);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource a(seed), b(seed);
    const auto rep = ldp::multi_perturb(UserTuple({0.3}), schema, PrivacyBudget(0.8), {}, a);
    const auto bit = ldp::onebit_perturb(UserTuple({0.3}), PrivacyBudget(0.8), b);
    const auto& payload = std::get<NumericReport>(rep.payload);
    CHECK(payload.sign == bit.sign);
    CHECK(payload.attr_index == bit.attr_index);
    CHECK(rep.scale == 1);
  }
}

TEST_CASE("per-coordinate variance scales linearly with the attribute count") {
  // With every coordinate set to x, the decoded coordinate has second
  // moment d * c^2 regardless of x, so its variance is d*c^2 - x^2 and the
  // d-attribute variance relates to the single-attribute one by
  // var_d = d * var_1 + (d - 1) * x^2. Verified from the exact outcome
  // distribution of the report: coordinate j is hit with probability 1/d
  // and then carries +/- d*c.
  const double eps = 0.7;
  const double e = std::exp(eps);
  const double c = ldp::rr_scale(eps);
  for (double x : {-0.8, 0.0, 0.35}) {
    const double p = (x * (e - 1.0) + e + 1.0) / (2.0 * e + 2.0);
    for (std::size_t d : {2, 3, 5, 8}) {
      const double dd = static_cast<double>(d);
      const double mean = (1.0 / dd) * (p * (dd * c) + (1.0 - p) * (-dd * c));
      const double second = (1.0 / dd) * (dd * c) * (dd * c);
      const double var_d = second - mean * mean;
      const double var_1 = c * c - x * x;
      CHECK(mean == doctest::Approx(x).epsilon(1e-12));
      CHECK(var_d == doctest::Approx(dd * var_1 + (dd - 1.0) * x * x).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform-pick estimates recover means and frequencies") {
  const Schema schema = mixed_schema();
  const auto matrices = orthogonal_matrices(schema);
  RandomSource rng(82);
  const std::size_t n = 200000;
  std::vector<MultiReport> reports;
  reports.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cat = rng.next_double() < 0.7 ? 1.0 : 2.0;
    reports.push_back(ldp::multi_perturb(UserTuple({0.3, cat}), schema, PrivacyBudget(1.0), matrices, rng));
  }
  const auto est = ldp::estimate_from_multi(reports, schema, matrices);
  REQUIRE(est.numeric_means.count(0) == 1);
  REQUIRE(est.categorical_freqs.count(1) == 1);
  CHECK(std::abs(est.numeric_means.at(0) - 0.3) < 0.03);
  REQUIRE(est.categorical_freqs.at(1).size() == 2);
  CHECK(std::abs(est.categorical_freqs.at(1)[0] - 0.7) < 0.03);
  CHECK(std::abs(est.categorical_freqs.at(1)[1] - 0.3) < 0.03);
}

TEST_CASE("attributes nobody reported estimate as zero counts") {
  const Schema schema = mixed_schema();
  const auto matrices = orthogonal_matrices(schema);

  MultiReport only_numeric;
  only_numeric.attr_index = 0;
  only_numeric.scale = 2;
  NumericReport bit;
  bit.d = 2;
  bit.attr_index = 0;
  bit.sign = 1;
  bit.epsilon = 1.0;
  only_numeric.payload = bit;

  const auto est = ldp::estimate_from_multi({only_numeric}, schema, matrices);
  REQUIRE(est.categorical_freqs.at(1).size() == 2);
  CHECK(est.categorical_freqs.at(1)[0] == 0.0);
  CHECK(est.categorical_freqs.at(1)[1] == 0.0);
}

TEST_CASE("budget-splitting reports carry a dense block plus one cell per category") {
  const Schema schema = mixed_schema();
  const auto matrices = orthogonal_matrices(schema);
  RandomSource rng(83);
  const double eps = 2.0;

  // Numeric block runs at half the budget here (one numeric of two
  // attributes), and each categorical cell at a d-th share.
  const auto numeric_k = ldp::duchi_constants(1, eps * 0.5, ldp::DuchiVariant::fixed);
  const double cell_mag = ldp::rr_scale(eps / 2.0) * std::sqrt(2.0);

  for (int i = 0; i < 200; ++i) {
    const auto rep = ldp::hybrid_perturb(UserTuple({-0.25, 1.0}), schema, PrivacyBudget(eps), matrices, rng);
    REQUIRE(rep.numeric_block.size() == 1);
    CHECK(std::abs(rep.numeric_block[0]) == doctest::Approx(numeric_k.b).epsilon(1e-12));
    REQUIRE(rep.cells.size() == 1);
    CHECK(rep.cells[0].attr_index == 1);
    CHECK(std::abs(rep.cells[0].alpha) == doctest::Approx(cell_mag).epsilon(1e-12));
  }
}

TEST_CASE("budget-splitting estimates recover means and frequencies") {
  const Schema schema = mixed_schema();
  const auto matrices = orthogonal_matrices(schema);
  RandomSource rng(84);
  const std::size_t n = 200000;
  std::vector<ldp::HybridReport> reports;
  reports.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cat = rng.next_double() < 0.6 ? 1.0 : 2.0;
    reports.push_back(ldp::hybrid_perturb(UserTuple({-0.4, cat}), schema, PrivacyBudget(2.0), matrices, rng));
  }
  const auto est = ldp::estimate_from_hybrid(reports, schema, matrices);
  CHECK(std::abs(est.numeric_means.at(0) + 0.4) < 0.025);
  CHECK(std::abs(est.categorical_freqs.at(1)[0] - 0.6) < 0.025);
  CHECK(std::abs(est.categorical_freqs.at(1)[1] - 0.4) < 0.025);
}

TEST_CASE("multi-attribute paths validate their inputs") {
  const Schema schema = mixed_schema();
  const auto matrices = orthogonal_matrices(schema);
  RandomSource rng(85);

  CHECK_THROWS_AS(ldp::multi_perturb(UserTuple({0.0, 3.0}), schema, PrivacyBudget(1.0), matrices, rng),
                  ldp::DomainViolation);

  // All-categorical schema: every pick needs a matrix, so an empty map
  // must fail deterministically.
  std::istringstream cat_only("c,categorical,2\n");
  const Schema cat_schema = Schema::parse(cat_only);
  CHECK_THROWS_AS(ldp::multi_perturb(UserTuple({1.0}), cat_schema, PrivacyBudget(1.0), {}, rng),
                  ldp::MissingMatrix);
  CHECK_THROWS_AS(ldp::hybrid_perturb(UserTuple({0.0, 1.0}), schema, PrivacyBudget(1.0), {}, rng),
                  ldp::MissingMatrix);
  CHECK_THROWS_AS(ldp::estimate_from_multi({}, schema, matrices), ldp::EmptyInput);
  CHECK_THROWS_AS(ldp::estimate_from_hybrid({}, schema, matrices), ldp::EmptyInput);

  MultiReport bad;
  bad.attr_index = 7;
  bad.scale = 2;
  NumericReport bit;
  bit.d = 2;
  bit.attr_index = 0;
  bit.sign = 1;
  bit.epsilon = 1.0;
  bad.payload = bit;
  CHECK_THROWS_AS(ldp::estimate_from_multi({bad}, schema, matrices), ldp::LengthMismatch);

  ldp::HybridReport short_block;
  short_block.numeric_block = {};
  CHECK_THROWS_AS(ldp::estimate_from_hybrid({short_block}, schema, matrices), ldp::LengthMismatch);

  ldp::HybridReport no_cells;
  no_cells.numeric_block = {1.0};
  CHECK_THROWS_AS(ldp::estimate_from_hybrid({no_cells}, schema, matrices), ldp::EmptyInput);
}

TEST_CASE("multi-attribute perturbation hits numeric attributes uniformly") {
  std::istringstream in("a,numeric,-1,1\nb,numeric,-1,1\nc,numeric,-1,1\n");
  const Schema schema = Schema::parse(in);
  RandomSource rng(86);
  std::size_t counts[3] = {0, 0, 0};
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    const auto rep = ldp::multi_perturb(UserTuple({0.1, 0.2, 0.3}), schema, PrivacyBudget(1.0), {}, rng);
    ++counts[rep.attr_index];
  }
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(std::abs(counts[j] / static_cast<double>(n) - 1.0 / 3.0) < 0.02);
  }
}
