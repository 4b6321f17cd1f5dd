#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "xgw/simd/kernels.hpp"

namespace xgw {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  simd::MatrixView view() const { return {data_.data(), rows_, cols_}; }
  std::vector<double> column(std::size_t j) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Lower Cholesky factor of a symmetric positive definite matrix.
struct Cholesky {
  Matrix lower;
  // Index of the first column whose pivot fell below the relative tolerance,
  // if the factorization failed.
  std::optional<std::size_t> failed_column;

  bool ok() const { return !failed_column; }
};

// pivot_j is rejected when it is <= tolerance * a(j, j).
Cholesky cholesky(const Matrix& a, double tolerance = 1e-12);
std::vector<double> cholesky_solve(const Cholesky& factor, std::span<const double> b);
Matrix cholesky_inverse(const Cholesky& factor);

}  // namespace xgw
