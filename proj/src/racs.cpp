#include "regopt/racs.hpp"

#include <algorithm>
#include <cmath>

namespace regopt {

std::string to_string(AxisPolicy policy) {
  switch (policy) {
    case AxisPolicy::ShapeDriven:
      return "shape";
    case AxisPolicy::ForceRows:
      return "rows";
    case AxisPolicy::ForceCols:
      return "cols";
  }
  return "?";
}

AxisPolicy parse_axis_policy(const std::string& text) {
  if (text == "shape" || text == "shape_driven") return AxisPolicy::ShapeDriven;
  if (text == "rows") return AxisPolicy::ForceRows;
  if (text == "cols" || text == "columns") return AxisPolicy::ForceCols;
  throw ConfigInvalid("unknown axis policy '" + text + "' (expected shape, rows or cols)");
}

Axis resolve_axis(std::size_t rows, std::size_t cols, AxisPolicy policy) noexcept {
  switch (policy) {
    case AxisPolicy::ForceRows:
      return Axis::Rows;
    case AxisPolicy::ForceCols:
      return Axis::Cols;
    case AxisPolicy::ShapeDriven:
      break;
  }
  return rows <= cols ? Axis::Rows : Axis::Cols;
}

namespace {

std::vector<double> inverse_or_throw(const std::vector<double>& norms, std::size_t step, Axis axis) {
  std::vector<double> inv(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (!(norms[i] > 0.0)) throw ZeroLineEncountered(step, axis, i);
    inv[i] = 1.0 / norms[i];
  }
  return inv;
}

// Divides each line by its norm. Dividing (rather than multiplying by the
// reciprocal) keeps a unit-norm line bit-identical after renormalization.
Matrix divide_rows(const Matrix& m, const std::vector<double>& norms) {
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (norms[i] == 0.0) continue;
    for (double& x : out.row(i)) x /= norms[i];
  }
  return out;
}

Matrix divide_cols(const Matrix& m, const std::vector<double>& norms) {
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (norms[j] != 0.0) r[j] /= norms[j];
  }
  return out;
}

}  // namespace

Matrix normal(const Matrix& m, NormOrder p, AxisPolicy policy) {
  if (resolve_axis(m.rows(), m.cols(), policy) == Axis::Rows) {
    return divide_rows(m, row_norms(m, p));
  }
  return divide_cols(m, col_norms(m, p));
}

Matrix racs_iterate(const Matrix& m, NormOrder p, std::size_t t) {
  if (t == 0) throw ConfigInvalid("racs_iterate: iteration count must be >= 1");
  Matrix out = m;
  for (std::size_t step = 1; step <= t; ++step) {
    const auto rn = row_norms(out, p);
    inverse_or_throw(rn, step, Axis::Rows);
    out = divide_rows(out, rn);
    const auto cn = col_norms(out, p);
    inverse_or_throw(cn, step, Axis::Cols);
    out = divide_cols(out, cn);
  }
  return out;
}

double operator_norm(const Matrix& m, NormOrder q) {
  switch (q) {
    case NormOrder::One: {
      const auto c = col_norms(m, NormOrder::One);
      return *std::max_element(c.begin(), c.end());
    }
    case NormOrder::Inf: {
      const auto r = row_norms(m, NormOrder::One);
      return *std::max_element(r.begin(), r.end());
    }
    case NormOrder::Two:
      return singular_values(m).front();
  }
  return 0.0;
}

double star_norm(const Matrix& m, StarNorm star) {
  return star.kind == StarNorm::Kind::Frobenius ? frobenius_norm(m) : operator_norm(m, star.q);
}

double kappa(const Matrix& m, KappaKind kind) {
  if (max_abs(m) == 0.0) throw Error("kappa: zero matrix");
  switch (kind.variant) {
    case KappaVariant::InfOverStar:
      return operator_norm(m, NormOrder::Inf) / star_norm(m, kind.star);
    case KappaVariant::OneOverStar:
      return operator_norm(m, NormOrder::One) / star_norm(m, kind.star);
    case KappaVariant::MaxEntryInvRows:
    case KappaVariant::MaxEntryInvCols:
      return max_abs(m) * star_norm(inverse(m), kind.star);
  }
  return 0.0;
}

Equilibration equilibrate_rows_1norm(const Matrix& m) {
  auto d = inverse_or_throw(row_norms(m, NormOrder::One), 1, Axis::Rows);
  Matrix scaled = divide_rows(m, row_norms(m, NormOrder::One));
  return {std::move(d), std::move(scaled)};
}

Equilibration equilibrate_cols_1norm(const Matrix& m) {
  auto d = inverse_or_throw(col_norms(m, NormOrder::One), 1, Axis::Cols);
  Matrix scaled = divide_cols(m, col_norms(m, NormOrder::One));
  return {std::move(d), std::move(scaled)};
}

}  // namespace regopt
