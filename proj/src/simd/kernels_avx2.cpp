// Built with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "kernel_table.hpp"

namespace xgw::simd::detail {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot_avx2(const double* a, const double* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void matvec_avx2(const double* a, size_t rows, size_t cols, const double* x, double* out) {
  for (size_t i = 0; i < rows; ++i) out[i] = dot_avx2(a + i * cols, x, cols);
}

// out[j] += s * row[j] over a full row, vectorized across j.
inline void axpy_row(double s, const double* row, double* out, size_t cols) {
  const __m256d vs = _mm256_set1_pd(s);
  size_t j = 0;
  for (; j + 4 <= cols; j += 4) {
    _mm256_storeu_pd(out + j,
                     _mm256_fmadd_pd(vs, _mm256_loadu_pd(row + j), _mm256_loadu_pd(out + j)));
  }
  for (; j < cols; ++j) out[j] += s * row[j];
}

void matvec_transposed_avx2(const double* a, size_t rows, size_t cols, const double* v,
                            double* out) {
  for (size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (size_t i = 0; i < rows; ++i) axpy_row(v[i], a + i * cols, out, cols);
}

void weighted_gram_avx2(const double* a, size_t rows, size_t cols, const double* w,
                        double* out) {
  for (size_t k = 0; k < cols * cols; ++k) out[k] = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    for (size_t j = 0; j < cols; ++j) axpy_row(w[i] * row[j], row, out + j * cols, cols);
  }
}

// Distance kernels avoid FMA so that results match the scalar reference
// bit for bit; boundary membership must not depend on the CPU.
size_t count_within_avx2(const double* xs, const double* ys, size_t n, double cx, double cy,
                         double radius_sq) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  const __m256d vr = _mm256_set1_pd(radius_sq);
  size_t count = 0;
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vcy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr, _CMP_LE_OQ));
    count += static_cast<size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    if (dx * dx + dy * dy <= radius_sq) ++count;
  }
  return count;
}

double min_squared_distance_avx2(const double* xs, const double* ys, size_t n, double cx,
                                 double cy) {
  const __m256d vcx = _mm256_set1_pd(cx);
  const __m256d vcy = _mm256_set1_pd(cy);
  __m256d best = _mm256_set1_pd(__builtin_inf());
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vcx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vcy);
    best = _mm256_min_pd(best, _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, best);
  double result = lanes[0];
  for (int k = 1; k < 4; ++k) result = lanes[k] < result ? lanes[k] : result;
  for (; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    const double d2 = dx * dx + dy * dy;
    if (d2 < result) result = d2;
  }
  return result;
}

}  // namespace

const KernelTable kAvx2Kernels{
    dot_avx2,          matvec_avx2,       matvec_transposed_avx2, weighted_gram_avx2,
    count_within_avx2, min_squared_distance_avx2,
};

}  // namespace xgw::simd::detail
