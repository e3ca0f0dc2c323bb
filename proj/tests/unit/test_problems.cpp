#include <doctest.h>

#include <cmath>
#include <random>

#include "regopt/error.hpp"
#include "regopt/optimizers.hpp"
#include "regopt/problems.hpp"
#include "regopt/verification.hpp"

using namespace regopt;

namespace {

Matrix rand_mat(std::size_t r, std::size_t c, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  return random_normal(r, c, rng, sd);
}

}  // namespace

TEST_CASE("identity quadratic") {
  const Problem p = quadratic_problem(Matrix::identity(3), Matrix::identity(4), Matrix(3, 4));
  const Matrix w = rand_mat(3, 4, 1);
  CHECK(p.value_of(w) == doctest::Approx(0.5 * std::pow(frobenius_norm(w), 2)));
  CHECK(max_abs(p.gradient_of(w) - w) == 0.0);
  CHECK(*p.lipschitz == doctest::Approx(1.0));
  CHECK(*p.f_star == 0.0);

  const Matrix c = rand_mat(3, 4, 2);
  const Problem q = quadratic_problem(Matrix::identity(3), Matrix::identity(4), c);
  CHECK(q.value_of(c) == 0.0);
  CHECK(*q.f_star == doctest::Approx(0.0));
}

TEST_CASE("quadratic with a rank-deficient range records a positive minimum") {
  // A is 3×2, so C components outside range(A) cannot be fit.
  const Matrix a{{1, 0}, {0, 1}, {0, 0}};
  const Matrix c{{0, 0}, {0, 0}, {3, 4}};
  const Problem p = quadratic_problem(a, Matrix::identity(2), c);
  CHECK(*p.f_star == doctest::Approx(12.5));
  CHECK(p.value_of(Matrix(2, 2)) == doctest::Approx(12.5));
}

TEST_CASE("random quadratic gradient matches finite differences") {
  const Problem p = quadratic_problem(rand_mat(4, 4, 3), rand_mat(4, 4, 4), rand_mat(4, 4, 5));
  const auto audit = finite_diff_gradient_audit(p, 5, 1e-5, 0, 1e-6);
  CHECK(audit.max_rel_error < 1e-6);
}

TEST_CASE("quadratic smoothness constant bounds gradient differences") {
  const Problem p = random_quadratic(4, 6, 9);
  std::mt19937_64 rng(10);
  for (int k = 0; k < 100; ++k) {
    const Matrix x = random_normal(4, 6, rng);
    const Matrix y = random_normal(4, 6, rng);
    const double lhs = frobenius_norm(p.gradient_of(x) - p.gradient_of(y));
    CHECK(lhs <= *p.lipschitz * frobenius_norm(x - y) * (1 + 1e-10));
    CHECK(p.value_of(x) >= *p.f_star);
  }
}

TEST_CASE("binary logistic at zero") {
  const Matrix x = rand_mat(10, 3, 11);
  std::vector<int> y(10);
  for (int i = 0; i < 10; ++i) y[i] = i % 2 ? 1 : -1;
  const Problem p = logistic_problem(x, y, 1);
  const Matrix w0(1, 3);
  CHECK(p.value_of(w0) == doctest::Approx(std::log(2.0)));
  const Matrix g = p.gradient_of(w0);
  for (std::size_t j = 0; j < 3; ++j) {
    double expect = 0.0;
    for (std::size_t i = 0; i < 10; ++i) expect -= y[i] * x(i, j);
    expect /= 2.0 * 10.0;
    CHECK(g(0, j) == doctest::Approx(expect));
  }
  const double sigma = singular_values(x)[0];
  CHECK(*p.lipschitz == doctest::Approx(sigma * sigma / 40.0));
  CHECK(finite_diff_gradient_audit(p, 5, 1e-5, 1, 1e-6).max_rel_error < 1e-6);
}

TEST_CASE("multiclass logistic") {
  const Dataset d = make_blobs(60, 4, 3, 1.0, 12);
  const Problem p = logistic_problem(with_bias_column(d.x), d.labels, 3);
  CHECK(p.value_of(Matrix(3, 5)) == doctest::Approx(std::log(3.0)));
  CHECK(finite_diff_gradient_audit(p, 5, 1e-5, 2, 1e-6).max_rel_error < 1e-6);
  CHECK_THROWS_AS(logistic_problem(d.x, std::vector<int>(60, 5), 3), ConfigInvalid);
  CHECK_THROWS_AS(logistic_problem(d.x, std::vector<int>(3, 0), 3), ShapeMismatch);
}

TEST_CASE("blobs are seeded and balanced") {
  const Dataset a = make_blobs(30, 2, 3, 2.0, 5);
  const Dataset b = make_blobs(30, 2, 3, 2.0, 5);
  CHECK(a.x == b.x);
  CHECK(a.labels == b.labels);
  for (std::size_t i = 0; i < 30; ++i) CHECK(a.labels[i] == static_cast<int>(i % 3));
}

TEST_CASE("mlp") {
  MlpSpec spec;
  spec.samples = 90;
  const Problem p = mlp_problem(spec, 3);
  REQUIRE(p.blocks.size() == 2);
  CHECK(p.blocks[0].name == "layer1");
  CHECK(p.blocks[1].name == "layer2");
  const Params zero{Matrix(16, 9), Matrix(3, 17)};
  CHECK(p.value(zero) == doctest::Approx(std::log(3.0)));

  spec.loss = MlpLoss::MeanSquared;
  const Problem q = mlp_problem(spec, 3);
  CHECK(q.value(zero) == doctest::Approx(0.5));

  for (const Problem* prob : {&p, &q}) {
    CHECK(finite_diff_gradient_audit(*prob, 5, 1e-5, 4).max_rel_error < 1e-5);
    Params w = prob->init(7);
    const Params g = prob->gradient(w);
    const double before = prob->value(w);
    for (std::size_t b = 0; b < w.size(); ++b) {
      OptState s = OptState::zeros_like(w[b]);
      w[b] = gdm_step(w[b], g[b], s, 1e-3, 0.0);
    }
    CHECK(prob->value(w) < before);
  }

  spec.hidden = 65;
  CHECK_THROWS_AS(mlp_problem(spec, 0), ConfigInvalid);
  spec.hidden = 8;
  spec.samples = 4096;
  CHECK_THROWS_AS(mlp_problem(spec, 0), ConfigInvalid);
}

TEST_CASE("rosenbrock") {
  const Problem p = rosenbrock_matrix(2, 3);
  const Matrix ones(2, 3, 1.0);
  CHECK(p.value_of(ones) == 0.0);
  CHECK(max_abs(p.gradient_of(ones)) == 0.0);
  CHECK_FALSE(p.lipschitz.has_value());
  CHECK(finite_diff_gradient_audit(p, 5, 1e-5, 5).max_rel_error < 1e-5);
  CHECK_THROWS_AS(rosenbrock_matrix(1, 1), ConfigInvalid);
}

TEST_CASE("parameter shape checks") {
  const Problem p = rosenbrock_matrix(2, 3);
  CHECK_THROWS_AS(p.check_params(Params{Matrix(3, 2)}), ShapeMismatch);
  CHECK_THROWS_AS(p.check_params(Params{}), ShapeMismatch);
}
