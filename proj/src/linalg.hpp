#pragma once

#include "errors.hpp"
#include "types.hpp"

namespace bolasso::linalg {

/// Solves A x = b for symmetric positive definite A by Cholesky
/// factorization. Throws NotPositiveDefinite when a pivot falls at or below
/// dim * eps * max(diag), and InvalidArgument for shape or symmetry
/// violations (symmetry checked to 1e-12 relative).
Vector solve_spd(const Matrix& a, const Vector& b);

/// Lower Cholesky factor of an SPD matrix; same pivot rule as solve_spd.
Matrix cholesky_factor(const Matrix& a);

/// Minimum-l2-norm x minimizing ||A x - b||_2. Singular values below
/// max(rows, cols) * eps * sigma_max are treated as zero, so rank-deficient
/// systems (duplicated columns, resampled rows) are always defined.
Vector min_norm_lstsq(const Matrix& a, const Vector& b);

/// Entry (i, j) of the result is a(rows[i], cols[j]).
Matrix submatrix(const Matrix& a, const IndexSet& rows, const IndexSet& cols);

}  // namespace bolasso::linalg
