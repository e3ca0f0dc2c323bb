#include "regopt/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

namespace regopt {

std::string to_string(NormOrder p) {
  switch (p) {
    case NormOrder::One:
      return "1";
    case NormOrder::Two:
      return "2";
    case NormOrder::Inf:
      return "inf";
  }
  return "?";
}

NormOrder parse_norm_order(const std::string& text) {
  if (text == "1") return NormOrder::One;
  if (text == "2") return NormOrder::Two;
  if (text == "inf" || text == "Inf" || text == "infinity") return NormOrder::Inf;
  throw ConfigInvalid("unknown norm order '" + text + "' (expected 1, 2 or inf)");
}

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw ShapeMismatch("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                        std::to_string(cols));
  }
}

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  check_dims(rows, cols);
  if (!std::isfinite(fill)) throw NonFiniteValue("non-finite fill value");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_dims(rows, cols);
  if (data_.size() != rows * cols) {
    throw ShapeMismatch("data length " + std::to_string(data_.size()) + " does not match " +
                        std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!all_finite()) throw NonFiniteValue("matrix data contains NaN or Inf");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  check_dims(rows_, cols_);
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeMismatch("ragged initializer list");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  if (!all_finite()) throw NonFiniteValue("matrix data contains NaN or Inf");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  if (!m.all_finite()) throw NonFiniteValue("diagonal contains NaN or Inf");
  return m;
}

std::vector<double> Matrix::col(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "addition");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
  require_same_shape(*this, rhs, "subtraction");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator-(Matrix m) { return m *= -1.0; }
Matrix operator*(Matrix m, double s) { return m *= s; }
Matrix operator*(double s, Matrix m) { return m *= s; }

void require_same_shape(const Matrix& a, const Matrix& b, const std::string& what) {
  if (!a.same_shape(b)) {
    throw ShapeMismatch(what + ": shapes " + shape_str(a) + " and " + shape_str(b) + " differ");
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeMismatch("matmul: " + shape_str(a) + " times " + shape_str(b));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeMismatch("matmul_tn: " + shape_str(a) + "ᵀ times " + shape_str(b));
  }
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto arow = a.row(k);
    auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      auto orow = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aki * brow[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeMismatch("matmul_nt: " + shape_str(a) + " times " + shape_str(b) + "ᵀ");
  }
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto arow = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto brow = b.row(j);
      out(i, j) = std::inner_product(arow.begin(), arow.end(), brow.begin(), 0.0);
    }
  }
  return out;
}

Matrix scale_rows(const Matrix& m, std::span<const double> scale) {
  if (scale.size() != m.rows()) throw ShapeMismatch("scale_rows: scale length mismatch");
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (double& x : out.row(i)) x *= scale[i];
  return out;
}

Matrix scale_cols(const Matrix& m, std::span<const double> scale) {
  if (scale.size() != m.cols()) throw ShapeMismatch("scale_cols: scale length mismatch");
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] *= scale[j];
  }
  return out;
}

double vector_norm(std::span<const double> v, NormOrder p) {
  switch (p) {
    case NormOrder::One: {
      double s = 0.0;
      for (double x : v) s += std::abs(x);
      return s;
    }
    case NormOrder::Two: {
      // Scaled accumulation keeps tiny and huge entries from under/overflowing.
      double scale = 0.0;
      for (double x : v) scale = std::max(scale, std::abs(x));
      if (scale == 0.0) return 0.0;
      double s = 0.0;
      for (double x : v) {
        const double y = x / scale;
        s += y * y;
      }
      return scale * std::sqrt(s);
    }
    case NormOrder::Inf: {
      double s = 0.0;
      for (double x : v) s = std::max(s, std::abs(x));
      return s;
    }
  }
  return 0.0;
}

double row_norm(const Matrix& m, std::size_t i, NormOrder p) { return vector_norm(m.row(i), p); }

double col_norm(const Matrix& m, std::size_t j, NormOrder p) {
  const auto c = m.col(j);
  return vector_norm(c, p);
}

std::vector<double> row_norms(const Matrix& m, NormOrder p) {
  std::vector<double> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = row_norm(m, i, p);
  return out;
}

std::vector<double> col_norms(const Matrix& m, NormOrder p) {
  std::vector<double> out(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) out[j] = col_norm(m, j, p);
  return out;
}

double frobenius_norm(const Matrix& m) { return vector_norm(m.data(), NormOrder::Two); }

double frobenius_inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "frobenius_inner");
  return std::inner_product(a.data().begin(), a.data().end(), b.data().begin(), 0.0);
}

double max_abs(const Matrix& m) { return vector_norm(m.data(), NormOrder::Inf); }

double rms(const Matrix& m) {
  return frobenius_norm(m) / std::sqrt(static_cast<double>(m.size()));
}

double rms_closed_form(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw ShapeMismatch("rms_closed_form: dimensions must be positive");
  return std::sqrt(1.0 / static_cast<double>(std::max(rows, cols)));
}

namespace {

using EigenMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenMat> as_eigen(const Matrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

Matrix from_eigen(const EigenMat& e) {
  Matrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  std::copy(e.data(), e.data() + e.size(), out.data().begin());
  return out;
}

}  // namespace

Svd svd_small(const Matrix& m) {
  if (std::min(m.rows(), m.cols()) > kMaxSvdDim) {
    throw DimensionTooLarge("singular values limited to min(m,n) <= " +
                            std::to_string(kMaxSvdDim) + ", got " + shape_str(m));
  }
  Eigen::JacobiSVD<EigenMat> svd(as_eigen(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  return Svd{from_eigen(svd.matrixU()), std::vector<double>(s.data(), s.data() + s.size()),
             from_eigen(svd.matrixV())};
}

std::vector<double> singular_values(const Matrix& m) { return svd_small(m).sigma; }

double stable_rank(const Matrix& m) {
  const auto sigma = singular_values(m);
  if (sigma.front() == 0.0) throw Error("stable_rank: zero matrix");
  const double fro = frobenius_norm(m);
  return (fro * fro) / (sigma.front() * sigma.front());
}

Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeMismatch("inverse: matrix is " + shape_str(m));
  const double scale = max_abs(m);
  if (scale == 0.0) throw SingularMatrix("inverse: zero matrix");
  Eigen::PartialPivLU<EigenMat> lu(as_eigen(m));
  const auto& packed = lu.matrixLU();
  for (Eigen::Index c = 0; c < packed.rows(); ++c) {
    if (std::abs(packed(c, c)) < 1e-12 * scale) {
      throw SingularMatrix("inverse: pivot below tolerance in column " + std::to_string(c));
    }
  }
  Matrix inv = from_eigen(lu.inverse());
  if (!inv.all_finite()) throw SingularMatrix("inverse: result is not finite");
  return inv;
}

Matrix random_normal(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (double& x : m.data()) x = dist(rng);
  return m;
}

void write_matrix_text(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing matrix");
}

Matrix read_matrix_text(std::istream& in) {
  long long rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw IoError("matrix text: expected positive 'm n' header");
  }
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(rows * cols));
  std::string token;
  for (long long k = 0; k < rows * cols; ++k) {
    if (!(in >> token)) throw IoError("matrix text: expected " + std::to_string(rows * cols) +
                                      " values, got " + std::to_string(k));
    char* end = nullptr;
    const double x = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size()) {
      throw IoError("matrix text: bad number '" + token + "'");
    }
    data.push_back(x);
  }
  if (in >> token) throw IoError("matrix text: trailing data '" + token + "'");
  return Matrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), std::move(data));
}

}  // namespace regopt
