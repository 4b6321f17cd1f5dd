#include "kernel_table.hpp"

namespace xgw::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void matvec_scalar(const double* a, size_t rows, size_t cols, const double* x, double* out) {
  for (size_t i = 0; i < rows; ++i) out[i] = dot_scalar(a + i * cols, x, cols);
}

void matvec_transposed_scalar(const double* a, size_t rows, size_t cols, const double* v,
                              double* out) {
  for (size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    const double vi = v[i];
    for (size_t j = 0; j < cols; ++j) out[j] += vi * row[j];
  }
}

void weighted_gram_scalar(const double* a, size_t rows, size_t cols, const double* w,
                          double* out) {
  for (size_t k = 0; k < cols * cols; ++k) out[k] = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    for (size_t j = 0; j < cols; ++j) {
      const double wa = w[i] * row[j];
      double* out_row = out + j * cols;
      for (size_t k = 0; k < cols; ++k) out_row[k] += wa * row[k];
    }
  }
}

size_t count_within_scalar(const double* xs, const double* ys, size_t n, double cx, double cy,
                           double radius_sq) {
  size_t count = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    if (dx * dx + dy * dy <= radius_sq) ++count;
  }
  return count;
}

double min_squared_distance_scalar(const double* xs, const double* ys, size_t n, double cx,
                                   double cy) {
  double best = __builtin_inf();
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) best = d2;
  }
  return best;
}

}  // namespace

const KernelTable kScalarKernels{
    dot_scalar,          matvec_scalar,       matvec_transposed_scalar, weighted_gram_scalar,
    count_within_scalar, min_squared_distance_scalar,
};

}  // namespace xgw::simd::detail
