#include "linalg.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>

namespace bolasso::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_spd_input(const Matrix& a, const Vector& b) {
  if (a.rows() != a.cols()) throw InvalidArgument("solve_spd: matrix is not square");
  if (a.rows() != b.size()) throw InvalidArgument("solve_spd: dimension mismatch");
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, scale)) {
    throw InvalidArgument("solve_spd: matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
}

// In-place lower Cholesky on a copy; pivot rule per the numerical contract.
Matrix factorize(const Matrix& a) {
  const Index n = a.rows();
  const double max_diag = a.diagonal().maxCoeff();
  const double pivot_floor = static_cast<double>(n) * kEps * std::max(max_diag, 0.0);
  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= pivot_floor) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(d) + " at index " +
                                std::to_string(j) + " below tolerance");
    }
    l(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

}  // namespace

Matrix cholesky_factor(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("cholesky_factor: matrix is not square");
  return factorize(a);
}

Vector solve_spd(const Matrix& a, const Vector& b) {
  check_spd_input(a, b);
  const Matrix l = factorize(a);
  const Index n = a.rows();
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    double s = b(i);
    for (Index k = 0; k < i; ++k) s -= l(i, k) * y(k);
    y(i) = s / l(i, i);
  }
  Vector x(n);
  for (Index i = n - 1; i >= 0; --i) {
    double s = y(i);
    for (Index k = i + 1; k < n; ++k) s -= l(k, i) * x(k);
    x(i) = s / l(i, i);
  }
  return x;
}

Vector min_norm_lstsq(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw InvalidArgument("min_norm_lstsq: dimension mismatch");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return Vector::Zero(a.cols());
  const double cutoff = static_cast<double>(std::max(a.rows(), a.cols())) * kEps * sv(0);
  Vector x = Vector::Zero(a.cols());
  const Vector utb = svd.matrixU().transpose() * b;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) x += (utb(i) / sv(i)) * svd.matrixV().col(i);
  }
  return x;
}

Matrix submatrix(const Matrix& a, const IndexSet& rows, const IndexSet& cols) {
  for (Index r : rows) {
    if (r < 0 || r >= a.rows()) throw IndexOutOfRange("submatrix: row index " + std::to_string(r) + " out of range");
  }
  for (Index c : cols) {
    if (c < 0 || c >= a.cols()) throw IndexOutOfRange("submatrix: col index " + std::to_string(c) + " out of range");
  }
  Matrix out(rows.size(), cols.size());
  for (Index i = 0; i < rows.size(); ++i) {
    for (Index j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  }
  return out;
}

}  // namespace bolasso::linalg
