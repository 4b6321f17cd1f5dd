#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "xgw/simd/kernels.hpp"

using namespace xgw::simd;

namespace {

std::vector<Level> supported_levels() {
  std::vector<Level> out;
  for (Level l : {Level::kScalar, Level::kAvx2, Level::kNeon}) {
    if (is_supported(l)) out.push_back(l);
  }
  return out;
}

struct LevelGuard {
  Level previous;
  explicit LevelGuard(Level l) : previous(set_level(l)) {}
  ~LevelGuard() { set_level(previous); }
};

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

// Naive loops used as the reference.
double ref_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("scalar is always supported and selectable") {
  CHECK(is_supported(Level::kScalar));
  LevelGuard guard(Level::kScalar);
  CHECK(active_level() == Level::kScalar);
}

TEST_CASE("unsupported levels fall back to scalar") {
  for (Level l : {Level::kAvx2, Level::kNeon}) {
    if (is_supported(l)) continue;
    LevelGuard guard(l);
    CHECK(active_level() == Level::kScalar);
  }
}

TEST_CASE("every supported level matches the reference kernels") {
  std::mt19937_64 rng(17);
  for (Level level : supported_levels()) {
    LevelGuard guard(level);
    CAPTURE(to_string(level));
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 16u, 31u, 67u, 200u}) {
      CAPTURE(n);
      const auto a = random_vector(rng, n);
      const auto b = random_vector(rng, n);
      double scale = 0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
      CHECK(std::abs(dot(a, b) - ref_dot(a, b)) <= 1e-14 * (scale + 1));

      for (std::size_t cols : {1u, 2u, 5u, 12u}) {
        const auto m = random_vector(rng, n * cols);
        const MatrixView view{m.data(), n, cols};
        const auto x = random_vector(rng, cols);
        std::vector<double> out(n);
        matvec(view, x, out);
        for (std::size_t i = 0; i < n; ++i) {
          double ref = 0, mag = 0;
          for (std::size_t j = 0; j < cols; ++j) {
            ref += m[i * cols + j] * x[j];
            mag += std::abs(m[i * cols + j] * x[j]);
          }
          CHECK(std::abs(out[i] - ref) <= 1e-14 * (mag + 1));
        }
        const auto v = random_vector(rng, n);
        std::vector<double> tout(cols);
        matvec_transposed(view, v, tout);
        std::vector<double> w(n);
        for (double& wi : w) wi = std::abs(random_vector(rng, 1)[0]);
        std::vector<double> gram(cols * cols);
        weighted_gram(view, w, gram);
        for (std::size_t j = 0; j < cols; ++j) {
          double ref = 0, mag = 0;
          for (std::size_t i = 0; i < n; ++i) {
            ref += m[i * cols + j] * v[i];
            mag += std::abs(m[i * cols + j] * v[i]);
          }
          CHECK(std::abs(tout[j] - ref) <= 1e-14 * (mag + 1));
          for (std::size_t k = 0; k < cols; ++k) {
            double g = 0, gm = 0;
            for (std::size_t i = 0; i < n; ++i) {
              g += m[i * cols + j] * w[i] * m[i * cols + k];
              gm += std::abs(m[i * cols + j] * w[i] * m[i * cols + k]);
            }
            CHECK(std::abs(gram[j * cols + k] - g) <= 1e-14 * (gm + 1));
            CHECK(gram[j * cols + k] == gram[k * cols + j]);
          }
        }
      }
    }
  }
}

TEST_CASE("distance kernels are bit-identical across levels") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = rng() % 40;
    auto xs = random_vector(rng, n, 50.0);
    auto ys = random_vector(rng, n, 50.0);
    // Points exactly on the radius.
    if (n > 2) {
      xs[0] = 3.0;
      ys[0] = 0.0;
      xs[1] = 0.0;
      ys[1] = -3.0;
    }
    const double cx = 0.0, cy = 0.0;
    std::size_t ref_count = 0;
    double ref_min = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (xs[i] - cx) * (xs[i] - cx) + (ys[i] - cy) * (ys[i] - cy);
      ref_count += d <= 9.0 ? 1 : 0;
      ref_min = std::min(ref_min, d);
    }
    for (Level level : supported_levels()) {
      LevelGuard guard(level);
      CAPTURE(to_string(level));
      CHECK(count_within(xs, ys, cx, cy, 9.0) == ref_count);
      CHECK(min_squared_distance(xs, ys, cx, cy) == ref_min);
    }
  }
}
