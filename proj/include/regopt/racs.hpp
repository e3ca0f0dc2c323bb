#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "regopt/matrix.hpp"

namespace regopt {

/// Which lines `normal` rescales. ShapeDriven picks rows iff rows <= cols.
enum class AxisPolicy { ShapeDriven, ForceRows, ForceCols };

std::string to_string(AxisPolicy policy);
AxisPolicy parse_axis_policy(const std::string& text);

Axis resolve_axis(std::size_t rows, std::size_t cols, AxisPolicy policy) noexcept;

/// Single-pass ℓp normalization of every row (or every column) to unit norm.
/// Zero lines pass through unchanged.
Matrix normal(const Matrix& m, NormOrder p, AxisPolicy policy = AxisPolicy::ShapeDriven);

/// `t` rounds of row normalization followed by column normalization.
/// Throws ZeroLineEncountered if any row or column is zero when it is rescaled;
/// the reported step is the 1-based round.
Matrix racs_iterate(const Matrix& m, NormOrder p, std::size_t t);

/// Imbalance measures minimized by 1-norm equilibration of rows or columns:
///  InfOverStar      ‖M‖_∞ / ‖M‖*            minimized over row scalings DM
///  OneOverStar      ‖M‖_1 / ‖M‖*            minimized over column scalings MD
///  MaxEntryInvRows  max|M_ij| · ‖M⁻¹‖*      minimized over row scalings DM
///  MaxEntryInvCols  max|M_ij| · ‖M⁻¹‖*      minimized over column scalings MD
/// ‖·‖_∞ and ‖·‖_1 are the induced operator norms (max row / column abs sum).
enum class KappaVariant { InfOverStar, OneOverStar, MaxEntryInvRows, MaxEntryInvCols };

/// ‖·‖*: Frobenius, or the operator norm induced by the vector q-norm.
struct StarNorm {
  enum class Kind { Frobenius, Holder };
  Kind kind = Kind::Frobenius;
  NormOrder q = NormOrder::Two;

  static StarNorm frobenius() { return {}; }
  static StarNorm holder(NormOrder q) { return {Kind::Holder, q}; }
};

struct KappaKind {
  KappaVariant variant = KappaVariant::InfOverStar;
  StarNorm star{};
};

/// Operator norm induced by the vector q-norm. q=2 uses the small-matrix SVD.
double operator_norm(const Matrix& m, NormOrder q);
double star_norm(const Matrix& m, StarNorm star);

/// Throws Error for the zero matrix, SingularMatrix when the inverse variants
/// meet a numerically singular input, ShapeMismatch when they get a non-square one.
double kappa(const Matrix& m, KappaKind kind);

struct Equilibration {
  std::vector<double> scaling;  // positive diagonal of D
  Matrix scaled;                // D·M (rows) or M·D (columns)
};

/// D with D·M having every row 1-norm equal to one. Throws ZeroLineEncountered on a zero row.
Equilibration equilibrate_rows_1norm(const Matrix& m);
/// Column mirror: M·D with every column 1-norm equal to one.
Equilibration equilibrate_cols_1norm(const Matrix& m);

}  // namespace regopt
