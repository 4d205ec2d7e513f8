// Test-side reference implementations, kept independent of the library's
// solver code paths: naive eliminations, explicit inverses, closed forms.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "types.hpp"

namespace oracle {

using bolasso::Index;
using bolasso::Matrix;
using bolasso::Vector;

/// Gaussian elimination with partial pivoting; throws on a vanishing pivot.
inline Vector gauss_solve(Matrix a, Vector b) {
  const Index n = a.rows();
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    for (Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) < 1e-300) throw std::runtime_error("gauss_solve: singular");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      std::swap(b(pivot), b(col));
    }
    for (Index r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      a.row(r).tail(n - col) -= f * a.row(col).tail(n - col);
      b(r) -= f * b(col);
    }
  }
  Vector x(n);
  for (Index r = n - 1; r >= 0; --r) {
    double s = b(r);
    for (Index c = r + 1; c < n; ++c) s -= a(r, c) * x(c);
    x(r) = s / a(r, r);
  }
  return x;
}

/// Explicit inverse via Gauss-Jordan with partial pivoting.
inline Matrix gauss_inverse(Matrix a) {
  const Index n = a.rows();
  Matrix inv = Matrix::Identity(n, n);
  for (Index col = 0; col < n; ++col) {
    Index pivot = col;
    for (Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) < 1e-300) throw std::runtime_error("gauss_inverse: singular");
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      inv.row(pivot).swap(inv.row(col));
    }
    const double d = a(col, col);
    a.row(col) /= d;
    inv.row(col) /= d;
    for (Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      a.row(r) -= f * a.row(col);
      inv.row(r) -= f * inv.row(col);
    }
  }
  return inv;
}

/// Minimum-norm least squares through rank-revealing Gauss-Jordan elimination
/// of the normal equations: a particular solution with free variables at
/// zero, then projection off the null space.
inline Vector pivoted_min_norm(const Matrix& a, const Vector& b) {
  const Index p = a.cols();
  Matrix m = a.transpose() * a;
  Vector c = a.transpose() * b;
  const double scale = m.cwiseAbs().maxCoeff();
  const double tol = static_cast<double>(p) * std::numeric_limits<double>::epsilon() *
                     std::max(scale, 1e-300) * 16.0;

  // Reduced row echelon form of [m | c].
  std::vector<Index> pivot_col;
  Index row = 0;
  for (Index col = 0; col < p && row < p; ++col) {
    Index best = row;
    for (Index r = row + 1; r < p; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(best, col))) best = r;
    }
    if (std::abs(m(best, col)) <= tol) continue;
    if (best != row) {
      m.row(best).swap(m.row(row));
      std::swap(c(best), c(row));
    }
    const double d = m(row, col);
    m.row(row) /= d;
    c(row) /= d;
    for (Index r = 0; r < p; ++r) {
      if (r == row) continue;
      const double f = m(r, col);
      if (f == 0.0) continue;
      m.row(r) -= f * m.row(row);
      c(r) -= f * c(row);
    }
    pivot_col.push_back(col);
    ++row;
  }

  std::vector<char> is_pivot(static_cast<std::size_t>(p), 0);
  for (Index pc : pivot_col) is_pivot[static_cast<std::size_t>(pc)] = 1;

  Vector particular = Vector::Zero(p);
  for (std::size_t r = 0; r < pivot_col.size(); ++r) {
    particular(pivot_col[r]) = c(static_cast<Index>(r));
  }

  // Null-space basis: one vector per free column.
  std::vector<Vector> basis;
  for (Index f = 0; f < p; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    Vector v = Vector::Zero(p);
    v(f) = 1.0;
    for (std::size_t r = 0; r < pivot_col.size(); ++r) {
      v(pivot_col[r]) = -m(static_cast<Index>(r), f);
    }
    basis.push_back(std::move(v));
  }
  if (basis.empty()) return particular;

  Matrix nmat(p, static_cast<Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) nmat.col(static_cast<Index>(k)) = basis[k];
  const Matrix ntn = nmat.transpose() * nmat;
  const Vector proj = gauss_solve(ntn, nmat.transpose() * particular);
  return particular - nmat * proj;
}

inline double soft_threshold(double z, double mu) {
  if (z > mu) return z - mu;
  if (z < -mu) return z + mu;
  return 0.0;
}

}  // namespace oracle
