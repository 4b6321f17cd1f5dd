// AArch64 Advanced SIMD variants. NEON is architecturally mandatory on
// AArch64, so no runtime probe is needed.

#include <arm_neon.h>

#include "kernel_table.hpp"

namespace xgw::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void matvec_neon(const double* a, size_t rows, size_t cols, const double* x, double* out) {
  for (size_t i = 0; i < rows; ++i) out[i] = dot_neon(a + i * cols, x, cols);
}

inline void axpy_row(double s, const double* row, double* out, size_t cols) {
  const float64x2_t vs = vdupq_n_f64(s);
  size_t j = 0;
  for (; j + 2 <= cols; j += 2) {
    vst1q_f64(out + j, vfmaq_f64(vld1q_f64(out + j), vs, vld1q_f64(row + j)));
  }
  for (; j < cols; ++j) out[j] += s * row[j];
}

void matvec_transposed_neon(const double* a, size_t rows, size_t cols, const double* v,
                            double* out) {
  for (size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (size_t i = 0; i < rows; ++i) axpy_row(v[i], a + i * cols, out, cols);
}

void weighted_gram_neon(const double* a, size_t rows, size_t cols, const double* w,
                        double* out) {
  for (size_t k = 0; k < cols * cols; ++k) out[k] = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    const double* row = a + i * cols;
    for (size_t j = 0; j < cols; ++j) axpy_row(w[i] * row[j], row, out + j * cols, cols);
  }
}

size_t count_within_neon(const double* xs, const double* ys, size_t n, double cx, double cy,
                         double radius_sq) {
  const float64x2_t vcx = vdupq_n_f64(cx);
  const float64x2_t vcy = vdupq_n_f64(cy);
  const float64x2_t vr = vdupq_n_f64(radius_sq);
  size_t count = 0;
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(xs + i), vcx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(ys + i), vcy);
    const float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    const uint64x2_t le = vcleq_f64(d2, vr);
    count += static_cast<size_t>((vgetq_lane_u64(le, 0) & 1u) + (vgetq_lane_u64(le, 1) & 1u));
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    if (dx * dx + dy * dy <= radius_sq) ++count;
  }
  return count;
}

double min_squared_distance_neon(const double* xs, const double* ys, size_t n, double cx,
                                 double cy) {
  const float64x2_t vcx = vdupq_n_f64(cx);
  const float64x2_t vcy = vdupq_n_f64(cy);
  float64x2_t best = vdupq_n_f64(__builtin_inf());
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(xs + i), vcx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(ys + i), vcy);
    best = vminq_f64(best, vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy)));
  }
  double result = vminvq_f64(best);
  for (; i < n; ++i) {
    const double dx = xs[i] - cx;
    const double dy = ys[i] - cy;
    const double d2 = dx * dx + dy * dy;
    if (d2 < result) result = d2;
  }
  return result;
}

}  // namespace

const KernelTable kNeonKernels{
    dot_neon,          matvec_neon,       matvec_transposed_neon, weighted_gram_neon,
    count_within_neon, min_squared_distance_neon,
};

}  // namespace xgw::simd::detail
