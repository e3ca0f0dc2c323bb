#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "regopt/matrix.hpp"

namespace regopt {

/// A problem's parameters: one matrix per named block.
using Params = std::vector<Matrix>;

struct BlockInfo {
  std::string name;
  std::size_t rows;
  std::size_t cols;
};

/// Differentiable objective over one or more parameter matrices.
///
/// Instances are immutable after construction and their callables are pure,
/// so a Problem may be shared across threads.
struct Problem {
  std::string name;
  std::vector<BlockInfo> blocks;
  std::function<double(const Params&)> value;
  std::function<Params(const Params&)> gradient;
  std::optional<double> lipschitz;  // Frobenius-norm smoothness constant
  std::optional<double> f_star;     // known minimum (or lower bound)
  std::function<Params(std::uint64_t)> init;

  /// Throws ShapeMismatch when `params` does not match `blocks`.
  void check_params(const Params& params) const;

  // Single-block conveniences.
  double value_of(const Matrix& w) const { return value(Params{w}); }
  Matrix gradient_of(const Matrix& w) const { return gradient(Params{w}).front(); }
};

/// f(W) = ½‖A W B − C‖_F² with A q×m, B n×r, C q×r.
/// L = σ_max(A)²σ_max(B)²; f* = ½‖C − P_A C P_B‖_F² (zero when C lies in the range).
Problem quadratic_problem(const Matrix& a, const Matrix& b, const Matrix& c);

/// Random well-posed quadratic with W m×n, q = m+2, r = n+2: A ~ N(0, 1/q) is q×m,
/// B ~ N(0, 1/r) is n×r, C ~ N(0, 1) is q×r.
Problem random_quadratic(std::size_t m, std::size_t n, std::uint64_t seed);

/// Logistic loss on data x (s×n).
///
/// classes == 1: binary, labels must be ±1, W is 1×n,
///   f = (1/s) Σ log(1 + exp(−y_i w·x_i)), L = σ_max(X)²/(4s).
/// classes >= 2: softmax cross-entropy, labels in [0, classes), W is classes×n,
///   f = (1/s) Σ −log softmax(W x_i)_{y_i}, L = σ_max(X)²/(2s).
Problem logistic_problem(const Matrix& x, const std::vector<int>& labels, std::size_t classes);

struct Dataset {
  Matrix x;                 // samples × features
  std::vector<int> labels;  // class index per sample
  std::size_t classes;
};

/// Seeded Gaussian mixture: class centers N(0, separation²), points N(center, 1).
/// Labels are balanced (sample i has class i mod classes).
Dataset make_blobs(std::size_t samples, std::size_t features, std::size_t classes,
                   double separation, std::uint64_t seed);

/// Appends a constant-one column (bias feature).
Matrix with_bias_column(const Matrix& x);

enum class MlpLoss { CrossEntropy, MeanSquared };

struct MlpSpec {
  std::size_t inputs = 8;
  std::size_t hidden = 16;
  std::size_t outputs = 3;
  std::size_t samples = 256;
  double separation = 2.0;
  MlpLoss loss = MlpLoss::CrossEntropy;
};

/// Two-layer tanh perceptron on seeded blobs. Blocks "layer1" (hidden × inputs+1)
/// and "layer2" (outputs × hidden+1), the last column of each being the bias.
/// Throws ConfigInvalid for widths above 64 or more than 2048 samples.
Problem mlp_problem(const MlpSpec& spec, std::uint64_t seed);

/// Chained Rosenbrock over the row-major entries of an m×n matrix:
/// Σ_k 100(x_{k+1} − x_k²)² + (1 − x_k)². Minimum 0 at all-ones.
Problem rosenbrock_matrix(std::size_t m, std::size_t n);

}  // namespace regopt
