#include "xgw/linalg.hpp"

#include <cmath>

namespace xgw {

std::vector<double> Matrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Cholesky cholesky(const Matrix& a, double tolerance) {
  const std::size_t n = a.rows();
  Cholesky result{Matrix(n, n), std::nullopt};
  Matrix& l = result.lower;
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > tolerance * a(j, j)) || !(pivot > 0.0)) {
      result.failed_column = j;
      return result;
    }
    const double diag = std::sqrt(pivot);
    l(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double sum = a(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      l(i, j) = sum / diag;
    }
  }
  return result;
}

std::vector<double> cholesky_solve(const Cholesky& factor, std::span<const double> b) {
  const Matrix& l = factor.lower;
  const std::size_t n = l.rows();
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= l(k, i) * y[k];
    y[i] /= l(i, i);
  }
  return y;
}

Matrix cholesky_inverse(const Cholesky& factor) {
  const std::size_t n = factor.lower.rows();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    const auto col = cholesky_solve(factor, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

}  // namespace xgw
