#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "kernel_table.hpp"
#include "xgw/simd/kernels.hpp"

namespace xgw::simd {
namespace {

using detail::KernelTable;

const KernelTable* table_for(Level level) {
  switch (level) {
#if defined(XGW_HAVE_AVX2_KERNELS)
    case Level::kAvx2:
      return &detail::kAvx2Kernels;
#endif
#if defined(XGW_HAVE_NEON_KERNELS)
    case Level::kNeon:
      return &detail::kNeonKernels;
#endif
    default:
      return &detail::kScalarKernels;
  }
}

Level initial_level() {
  Level level = best_supported_level();
  if (const char* env = std::getenv("XGW_SIMD")) {
    const std::string requested(env);
    if (requested == "scalar") level = Level::kScalar;
    if (requested == "avx2" && is_supported(Level::kAvx2)) level = Level::kAvx2;
    if (requested == "neon" && is_supported(Level::kNeon)) level = Level::kNeon;
  }
  return level;
}

std::atomic<Level>& level_slot() {
  static std::atomic<Level> slot{initial_level()};
  return slot;
}

const KernelTable& kernels() { return *table_for(level_slot().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kScalar:
      return "scalar";
    case Level::kAvx2:
      return "avx2";
    case Level::kNeon:
      return "neon";
  }
  return "scalar";
}

bool is_supported(Level level) {
  switch (level) {
    case Level::kScalar:
      return true;
    case Level::kAvx2:
#if defined(XGW_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Level::kNeon:
#if defined(XGW_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Level best_supported_level() {
  if (is_supported(Level::kAvx2)) return Level::kAvx2;
  if (is_supported(Level::kNeon)) return Level::kNeon;
  return Level::kScalar;
}

Level active_level() { return level_slot().load(); }

Level set_level(Level level) {
  if (!is_supported(level)) level = Level::kScalar;
  return level_slot().exchange(level);
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return kernels().dot(a.data(), b.data(), a.size());
}

void matvec(MatrixView a, std::span<const double> x, std::span<double> out) {
  assert(x.size() == a.cols && out.size() == a.rows);
  kernels().matvec(a.data, a.rows, a.cols, x.data(), out.data());
}

void matvec_transposed(MatrixView a, std::span<const double> v, std::span<double> out) {
  assert(v.size() == a.rows && out.size() == a.cols);
  kernels().matvec_transposed(a.data, a.rows, a.cols, v.data(), out.data());
}

void weighted_gram(MatrixView a, std::span<const double> w, std::span<double> out) {
  assert(w.size() == a.rows && out.size() == a.cols * a.cols);
  kernels().weighted_gram(a.data, a.rows, a.cols, w.data(), out.data());
  // Mirror the upper triangle so the result is exactly symmetric.
  for (std::size_t j = 0; j < a.cols; ++j) {
    for (std::size_t k = j + 1; k < a.cols; ++k) out[k * a.cols + j] = out[j * a.cols + k];
  }
}

std::size_t count_within(std::span<const double> xs, std::span<const double> ys, double cx,
                         double cy, double radius_sq) {
  assert(xs.size() == ys.size());
  return kernels().count_within(xs.data(), ys.data(), xs.size(), cx, cy, radius_sq);
}

double min_squared_distance(std::span<const double> xs, std::span<const double> ys, double cx,
                            double cy) {
  assert(xs.size() == ys.size());
  return kernels().min_squared_distance(xs.data(), ys.data(), xs.size(), cx, cy);
}

}  // namespace xgw::simd
