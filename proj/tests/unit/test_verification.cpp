#include <doctest.h>

#include <cmath>
#include <random>

#include "regopt/error.hpp"
#include "regopt/verification.hpp"

using namespace regopt;

namespace {

Matrix rand_mat(std::size_t r, std::size_t c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_normal(r, c, rng);
}

}  // namespace

TEST_CASE("report evaluation and json") {
  auto r = TheoremReport::evaluate(TheoremId::T2, "x", 1.0, 1.0, 0.0);
  CHECK(r.passed);
  r = TheoremReport::evaluate(TheoremId::T2, "x", 1.0 + 1e-10, 1.0, 1e-9);
  CHECK(r.passed);
  r = TheoremReport::evaluate(TheoremId::T2, "x", NAN, 1.0, 0.0);
  CHECK_FALSE(r.passed);
  const auto j = r.to_json();
  CHECK(j["observed"] == "nan");
  CHECK(j["theorem_id"] == "T2");
  CHECK(parse_theorem_id("T4") == TheoremId::T4);
  CHECK_THROWS_AS(parse_theorem_id("T5"), ConfigInvalid);
}

TEST_CASE("norm equivalence constants") {
  auto e = norm_equivalence(NormOrder::One, 16);
  CHECK(e.delta == 0.25);
  CHECK(e.gamma == 1.0);
  e = norm_equivalence(NormOrder::Inf, 16);
  CHECK(e.delta == 1.0);
  CHECK(e.gamma == 4.0);
  CHECK(normalized_line_length(4, 16) == 16);
  CHECK(normalized_line_length(16, 4) == 16);
}

TEST_CASE("gamma statistics") {
  const Matrix g = rand_mat(3, 8, 1);
  auto s = gamma_stats(g, NormOrder::Two);
  CHECK(std::abs(s.weighted - 1.0) < 1e-12);
  CHECK(std::abs(s.ratio - 3.0 / row_norm_sum(g)) < 1e-12);

  const Matrix v{{1, -2, 2, 4}};
  s = gamma_stats(v, NormOrder::One);
  CHECK(s.weighted == doctest::Approx(5.0 / 9.0));
  s = gamma_stats(v, NormOrder::Inf);
  CHECK(s.weighted == doctest::Approx(5.0 / 4.0));

  std::vector<Matrix> traj;
  for (int k = 0; k < 20; ++k) traj.push_back(rand_mat(4, 8, 10 + k));
  for (NormOrder p : {NormOrder::One, NormOrder::Two, NormOrder::Inf}) {
    const auto rep = check_gamma_bounds(traj, p);
    CHECK(rep.report.passed);
    const auto eq = norm_equivalence(p, 8);
    for (double w : rep.weighted) {
      CHECK(w >= eq.delta * (1 - 1e-12));
      CHECK(w <= eq.gamma * (1 + 1e-12));
    }
  }
  CHECK_THROWS_AS(gamma_stats(Matrix(2, 3), NormOrder::Two), ZeroGradient);
}

TEST_CASE("descent check precondition handling") {
  const Problem p = quadratic_problem(Matrix::identity(2), Matrix::identity(4), Matrix(2, 4));
  DescentOptions o;
  o.alpha = 10.0;
  auto r = check_descent_mu0(p, o);
  CHECK(r.skipped);
  CHECK_FALSE(r.passed);

  Problem no_l = p;
  no_l.lipschitz.reset();
  CHECK(check_descent_mu0(no_l, DescentOptions{}).skipped);
}

TEST_CASE("naive reg with fixed step on the identity quadratic ends in a limit cycle") {
  // Each row moves a fixed distance α toward zero, so a row whose norm drops
  // below α overshoots; the gradient stalls at norm ~α/2 per row.
  const Problem p = quadratic_problem(Matrix::identity(2), Matrix::identity(4), Matrix(2, 4));
  DescentOptions o;
  o.alpha = 0.5;
  o.max_iterations = 10000;
  RunRecord rec;
  const auto r = check_descent_mu0(p, o, &rec);
  CHECK_FALSE(r.skipped);
  CHECK_FALSE(r.passed);
  const double tail = rec.grad_fro.back();
  CHECK(tail > 0.1);
  CHECK(tail < 1.0);
  MESSAGE(r.detail);
}

TEST_CASE("finite-N momentum bound on a small quadratic") {
  const Problem p = random_quadratic(4, 8, 3);
  MomentumBoundOptions o;
  o.mu = 0.9;
  o.alpha = 0.01;
  o.iterations = 2000;
  RunRecord rec;
  const auto reports = check_finite_n_bound(p, o, &rec);
  REQUIRE(reports.size() == 3);
  for (const auto& r : reports) CHECK_MESSAGE(r.passed, r.check << ": " << r.detail);
  // Asymptotic part of the bound: Lαm/2 + 2μm/(1−μ).
  const double asymptotic = *p.lipschitz * 0.01 * 4 / 2 + 2 * 0.9 * 4 / 0.1;
  CHECK(reports[0].bound > asymptotic);
  CHECK(reports[0].bound < asymptotic + (rec.f.front() - *p.f_star) / (2000 * 0.01) + 1e-9);
  CHECK(rec.size() == 2000);

  MomentumBoundOptions zero_mu = o;
  zero_mu.mu = 0.0;
  for (const auto& r : check_finite_n_bound(p, zero_mu)) CHECK(r.passed);

  CHECK_THROWS_AS(check_finite_n_bound(random_quadratic(8, 4, 1), o), ConfigInvalid);
  CHECK_THROWS_AS(check_finite_n_bound(rosenbrock_matrix(2, 3), o), ConfigInvalid);
}

TEST_CASE("rms theorem check") {
  const auto r = check_rms_theorem({{8, 8}, {1, 5}, {40, 3}}, 300, 4);
  CHECK(r.passed);
  CHECK(r.observed < 1e-12);
}

TEST_CASE("equilibration minimality oracle") {
  MinimalityOptions o;
  o.matrices = 10;
  o.scalings = 200;
  CHECK(check_equilibration_minimality(TheoremId::T1a, o).passed);
  CHECK(check_equilibration_minimality(TheoremId::T1b, o).passed);
  o.star = StarNorm::holder(NormOrder::Two);
  CHECK(check_equilibration_minimality(TheoremId::T1a, o).passed);
  CHECK_THROWS_AS(check_equilibration_minimality(TheoremId::T2, o), ConfigInvalid);
}

TEST_CASE("gradient audit flags a wrong gradient") {
  Problem p = quadratic_problem(Matrix::identity(2), Matrix::identity(2), Matrix(2, 2));
  CHECK(finite_diff_gradient_audit(p, 3, 1e-5, 0).passed);
  p.gradient = [](const Params& w) { return Params{2.0 * w[0]}; };
  const auto a = finite_diff_gradient_audit(p, 3, 1e-5, 0);
  CHECK_FALSE(a.passed);
  CHECK(a.max_rel_error == doctest::Approx(0.5));
}

TEST_CASE("reports are reproducible from the seed") {
  const auto a = check_rms_theorem({{5, 9}}, 50, 17);
  const auto b = check_rms_theorem({{5, 9}}, 50, 17);
  CHECK(a.observed == b.observed);
  CHECK(a.to_json() == b.to_json());
}
