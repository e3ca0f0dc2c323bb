#include <doctest.h>

#include <cmath>
#include <random>

#include "regopt/error.hpp"
#include "regopt/racs.hpp"

using namespace regopt;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

}  // namespace

TEST_CASE("normal on fixed inputs") {
  CHECK(normal(Matrix::identity(2), NormOrder::Two) == Matrix::identity(2));
  const Matrix out = normal(Matrix{{3, 4}, {0, 5}}, NormOrder::Two, AxisPolicy::ForceRows);
  CHECK(max_abs_diff(out, Matrix{{0.6, 0.8}, {0, 1}}) < 1e-15);
}

TEST_CASE("shape-driven policy picks columns for tall input") {
  std::mt19937_64 rng(2);
  const Matrix m = random_normal(16, 8, rng);
  CHECK(resolve_axis(16, 8, AxisPolicy::ShapeDriven) == Axis::Cols);
  CHECK(resolve_axis(8, 8, AxisPolicy::ShapeDriven) == Axis::Rows);
  const Matrix out = normal(m, NormOrder::One);
  for (double n : col_norms(out, NormOrder::One)) CHECK(n == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero lines pass through normal") {
  const Matrix m{{0, 0, 0}, {1, 2, 2}};
  const Matrix out = normal(m, NormOrder::Two);
  CHECK(out(0, 0) == 0.0);
  CHECK(row_norm(out, 1, NormOrder::Two) == doctest::Approx(1.0));
}

TEST_CASE("normal is idempotent, sign equivariant and row-scale invariant") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(0.1, 10.0);
  for (NormOrder p : {NormOrder::One, NormOrder::Two, NormOrder::Inf}) {
    const Matrix m = random_normal(5, 9, rng);
    const Matrix once = normal(m, p);
    CHECK(max_abs_diff(normal(once, p), once) < 1e-12);
    CHECK(max_abs_diff(normal(-m, p), -once) == 0.0);
    std::vector<double> d(5);
    for (double& x : d) x = pos(rng);
    CHECK(max_abs_diff(normal(scale_rows(m, d), p), once) < 1e-12);
  }
}

TEST_CASE("rms of l2-normalized matrix is exactly the closed form") {
  std::mt19937_64 rng(6);
  for (auto [r, c] : {std::pair{1, 1}, std::pair{1, 9}, std::pair{9, 1}, std::pair{7, 7},
                      std::pair{12, 5}, std::pair{5, 12}}) {
    const Matrix m = random_normal(r, c, rng);
    CHECK(std::abs(rms(normal(m, NormOrder::Two)) - rms_closed_form(r, c)) < 1e-12);
  }
}

TEST_CASE("racs_iterate") {
  const std::vector<double> d{2.0, 5.0, 0.25};
  CHECK(max_abs_diff(racs_iterate(Matrix::diagonal(d), NormOrder::Two, 3), Matrix::identity(3)) <
        1e-15);

  const Matrix out = racs_iterate(Matrix{{4, 0}, {3, 1}}, NormOrder::One, 1);
  for (double n : col_norms(out, NormOrder::One)) CHECK(n == doctest::Approx(1.0));
  // Row pass: [[1,0],[0.75,0.25]]; column sums 1.75 and 0.25.
  CHECK(out(0, 0) == doctest::Approx(1.0 / 1.75));
  CHECK(out(1, 1) == doctest::Approx(1.0));

  CHECK_THROWS_AS(racs_iterate(Matrix{{1, 0}, {1, 0}}, NormOrder::Two, 1), ZeroLineEncountered);
  CHECK_THROWS_AS(racs_iterate(Matrix::identity(2), NormOrder::Two, 0), ConfigInvalid);
  try {
    racs_iterate(Matrix{{1, 2}, {0, 0}}, NormOrder::Two, 2);
    FAIL("expected ZeroLineEncountered");
  } catch (const ZeroLineEncountered& e) {
    CHECK(e.step() == 1);
    CHECK(e.axis() == Axis::Rows);
    CHECK(e.index() == 1);
  }
}

TEST_CASE("racs contraction is logged") {
  std::mt19937_64 rng(8);
  const Matrix m = random_normal(8, 8, rng);
  const Matrix a = racs_iterate(m, NormOrder::Two, 5);
  const Matrix b = racs_iterate(m, NormOrder::Two, 6);
  const Matrix c = racs_iterate(m, NormOrder::Two, 7);
  MESSAGE("t=5→6 diff " << max_abs_diff(a, b) << ", t=6→7 diff " << max_abs_diff(b, c));
}

TEST_CASE("kappa hand values") {
  const KappaKind a{KappaVariant::InfOverStar, StarNorm::frobenius()};
  CHECK(kappa(Matrix::identity(4), a) == doctest::Approx(0.5));
  const std::vector<double> d{10.0, 1.0};
  CHECK(kappa(Matrix::diagonal(d), a) == doctest::Approx(10.0 / std::sqrt(101.0)));
  CHECK_THROWS_AS(kappa(Matrix(2, 2), a), Error);
  const KappaKind c{KappaVariant::MaxEntryInvRows, StarNorm::frobenius()};
  CHECK_THROWS_AS(kappa(Matrix(2, 3, 1.0), c), ShapeMismatch);
  CHECK_THROWS_AS(kappa(Matrix{{1, 2}, {2, 4}}, c), SingularMatrix);
}

TEST_CASE("operator norms") {
  const Matrix m{{1, -2}, {3, 4}};
  CHECK(operator_norm(m, NormOrder::Inf) == 7.0);
  CHECK(operator_norm(m, NormOrder::One) == 6.0);
  CHECK(operator_norm(m, NormOrder::Two) == doctest::Approx(singular_values(m)[0]));
}

TEST_CASE("equilibration") {
  auto e = equilibrate_rows_1norm(Matrix(3, 4, 1.0));
  for (double s : e.scaling) CHECK(s == doctest::Approx(0.25));
  e = equilibrate_rows_1norm(Matrix{{2, 0}, {0, 8}});
  CHECK(e.scaling[0] == 0.5);
  CHECK(e.scaling[1] == 0.125);
  std::mt19937_64 rng(12);
  const Matrix m = random_normal(6, 4, rng);
  for (double n : row_norms(equilibrate_rows_1norm(m).scaled, NormOrder::One))
    CHECK(n == doctest::Approx(1.0));
  for (double n : col_norms(equilibrate_cols_1norm(m).scaled, NormOrder::One))
    CHECK(n == doctest::Approx(1.0));
  CHECK_THROWS_AS(equilibrate_rows_1norm(Matrix{{0, 0}, {1, 1}}), ZeroLineEncountered);
}

TEST_CASE("row-equilibrated matrix minimizes kappa over sampled row scalings") {
  std::mt19937_64 rng(21);
  std::lognormal_distribution<double> logn(0.0, 2.0);
  for (StarNorm star : {StarNorm::frobenius(), StarNorm::holder(NormOrder::Two)}) {
    const Matrix m = random_normal(6, 6, rng);
    const KappaKind kind{KappaVariant::InfOverStar, star};
    const double best = kappa(equilibrate_rows_1norm(m).scaled, kind);
    for (int s = 0; s < 1000; ++s) {
      std::vector<double> d(6);
      for (double& x : d) x = logn(rng);
      CHECK(best <= kappa(scale_rows(m, d), kind) + 1e-12);
    }
  }
}

TEST_CASE("column-equilibrated matrix minimizes the column variant") {
  std::mt19937_64 rng(22);
  std::lognormal_distribution<double> logn(0.0, 2.0);
  const Matrix m = random_normal(5, 7, rng);
  const KappaKind kind{KappaVariant::OneOverStar, StarNorm::frobenius()};
  const double best = kappa(equilibrate_cols_1norm(m).scaled, kind);
  for (int s = 0; s < 1000; ++s) {
    std::vector<double> d(7);
    for (double& x : d) x = logn(rng);
    CHECK(best <= kappa(scale_cols(m, d), kind) + 1e-12);
  }
}
