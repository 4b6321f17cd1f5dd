#pragma once

// Data-parallel inner loops used by the IRLS fitter and the frame geometry.
// Each kernel has a scalar reference implementation and vector variants; the
// variant is picked once at startup from the running CPU and can be
// overridden (XGW_SIMD=scalar|avx2|neon, or set_level()).

#include <cstddef>
#include <span>
#include <string_view>

namespace xgw::simd {

enum class Level { kScalar, kAvx2, kNeon };

std::string_view to_string(Level level);
bool is_supported(Level level);
Level best_supported_level();
Level active_level();
// Returns the previous level. Unsupported levels fall back to scalar.
Level set_level(Level level);

// Row-major matrix view.
struct MatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  const double* row(std::size_t i) const { return data + i * cols; }
};

double dot(std::span<const double> a, std::span<const double> b);

// out = A x
void matvec(MatrixView a, std::span<const double> x, std::span<double> out);

// out = A^T v
void matvec_transposed(MatrixView a, std::span<const double> v, std::span<double> out);

// out (cols x cols, row-major, full symmetric) = A^T diag(w) A
void weighted_gram(MatrixView a, std::span<const double> w, std::span<double> out);

// Number of points with (x-cx)^2 + (y-cy)^2 <= radius_sq.
std::size_t count_within(std::span<const double> xs, std::span<const double> ys, double cx,
                         double cy, double radius_sq);

// Smallest squared distance from (cx, cy); +inf for no points.
double min_squared_distance(std::span<const double> xs, std::span<const double> ys, double cx,
                            double cy);

}  // namespace xgw::simd
