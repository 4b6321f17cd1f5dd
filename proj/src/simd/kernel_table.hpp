#pragma once

// Raw kernel signatures shared by every variant. Kept free of standard
// library headers so the NEON translation unit builds freestanding.

#include <stddef.h>

namespace xgw::simd::detail {

struct KernelTable {
  double (*dot)(const double* a, const double* b, size_t n);
  void (*matvec)(const double* a, size_t rows, size_t cols, const double* x, double* out);
  void (*matvec_transposed)(const double* a, size_t rows, size_t cols, const double* v,
                            double* out);
  void (*weighted_gram)(const double* a, size_t rows, size_t cols, const double* w, double* out);
  size_t (*count_within)(const double* xs, const double* ys, size_t n, double cx, double cy,
                         double radius_sq);
  double (*min_squared_distance)(const double* xs, const double* ys, size_t n, double cx,
                                 double cy);
};

extern const KernelTable kScalarKernels;
#if defined(XGW_HAVE_AVX2_KERNELS)
extern const KernelTable kAvx2Kernels;
#endif
#if defined(XGW_HAVE_NEON_KERNELS)
extern const KernelTable kNeonKernels;
#endif

}  // namespace xgw::simd::detail
