#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "regopt/error.hpp"

namespace regopt {

/// Vector/line norm order. Only the three orders exercised by the optimizer are supported.
enum class NormOrder { One, Two, Inf };

std::string to_string(NormOrder p);
NormOrder parse_norm_order(const std::string& text);

/// Dense row-major matrix of doubles with at least one row and one column.
///
/// Constructors reject non-finite data; arithmetic helpers preserve shape and
/// throw ShapeMismatch on incompatible operands.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::vector<double> col(std::size_t j) const;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  bool all_finite() const noexcept;

  Matrix& operator+=(const Matrix& rhs);
  Matrix& operator-=(const Matrix& rhs);
  Matrix& operator*=(double s);

  bool operator==(const Matrix& rhs) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix m);
Matrix operator*(Matrix m, double s);
Matrix operator*(double s, Matrix m);

/// Matrix product; throws ShapeMismatch when inner dimensions differ.
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ·b without forming the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a·bᵀ without forming the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// Scales row i by scale[i].
Matrix scale_rows(const Matrix& m, std::span<const double> scale);
/// Scales column j by scale[j].
Matrix scale_cols(const Matrix& m, std::span<const double> scale);

void require_same_shape(const Matrix& a, const Matrix& b, const std::string& what);

double vector_norm(std::span<const double> v, NormOrder p);
double row_norm(const Matrix& m, std::size_t i, NormOrder p);
double col_norm(const Matrix& m, std::size_t j, NormOrder p);
std::vector<double> row_norms(const Matrix& m, NormOrder p);
std::vector<double> col_norms(const Matrix& m, NormOrder p);

double frobenius_norm(const Matrix& m);
double frobenius_inner(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& m);

/// Root mean square of the entries, frobenius_norm / sqrt(m n).
double rms(const Matrix& m);
/// RMS of any ℓ2 row- or column-normalized m×n matrix with no zero lines.
double rms_closed_form(std::size_t rows, std::size_t cols);

inline constexpr std::size_t kMaxSvdDim = 64;

struct Svd {
  Matrix u;                    // rows × k, orthonormal columns where sigma > 0
  std::vector<double> sigma;   // k = min(rows, cols), nonincreasing
  Matrix v;                    // cols × k
};

/// Thin SVD (Eigen JacobiSVD). Throws DimensionTooLarge when
/// min(rows, cols) > kMaxSvdDim.
Svd svd_small(const Matrix& m);
std::vector<double> singular_values(const Matrix& m);
/// ‖M‖_F² / σ_max². Throws Error for the zero matrix.
double stable_rank(const Matrix& m);

/// Inverse via partial-pivot LU. Throws SingularMatrix
/// when a pivot falls below 1e-12 times the largest entry of m.
Matrix inverse(const Matrix& m);

Matrix random_normal(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double stddev = 1.0);

/// Fixture format: "m n" then m lines of n values, 17 significant digits.
void write_matrix_text(std::ostream& out, const Matrix& m);
Matrix read_matrix_text(std::istream& in);

}  // namespace regopt
