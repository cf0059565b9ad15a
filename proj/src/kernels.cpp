#include "cwdyn/kernels.hpp"

#include <immintrin.h>

#include <atomic>
#include <cmath>

namespace cwdyn::kernels {

namespace {

std::atomic<int> g_forced{-1};

inline double frac1(double v) {
  double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
  int f = g_forced.load();
  if (f == static_cast<int>(Isa::scalar)) return Isa::scalar;
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

void force_isa(Isa isa) { g_forced.store(static_cast<int>(isa)); }
void reset_isa() { g_forced.store(-1); }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

// ---- scalar reference ----

void scalar::torus_dist_to(const double* ax, const double* ay, std::size_t n,
                           double bx, double by, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double dx = ax[i] - bx;
    double dy = ay[i] - by;
    dx = dx - std::nearbyint(dx);
    dy = dy - std::nearbyint(dy);
    out[i] = std::sqrt(dx * dx + dy * dy);
  }
}

void scalar::linear_step_mod1(double* x, double* y, std::size_t n,
                              const std::int64_t m[4], int steps) {
  const double a = double(m[0]), b = double(m[1]), c = double(m[2]), d = double(m[3]);
  for (std::size_t i = 0; i < n; ++i) {
    double u = x[i], v = y[i];
    for (int s = 0; s < steps; ++s) {
      double nu = a * u + b * v;
      double nv = c * u + d * v;
      u = frac1(nu);
      v = frac1(nv);
    }
    x[i] = u;
    y[i] = v;
  }
}

double scalar::max_pair_dist(const double* x, const double* y, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dx = x[i] - x[j];
      double dy = y[i] - y[j];
      double s = dx * dx + dy * dy;
      if (s > best) best = s;
    }
  }
  return std::sqrt(best);
}

// ---- AVX2 ----

__attribute__((target("avx2"))) void avx2::torus_dist_to(
    const double* ax, const double* ay, std::size_t n, double bx, double by, double* out) {
  const __m256d vbx = _mm256_set1_pd(bx);
  const __m256d vby = _mm256_set1_pd(by);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(ax + i), vbx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ay + i), vby);
    dx = _mm256_sub_pd(dx, _mm256_round_pd(dx, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
    dy = _mm256_sub_pd(dy, _mm256_round_pd(dy, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC));
    __m256d s = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(s));
  }
  if (i < n) scalar::torus_dist_to(ax + i, ay + i, n - i, bx, by, out + i);
}

__attribute__((target("avx2"))) void avx2::linear_step_mod1(
    double* x, double* y, std::size_t n, const std::int64_t m[4], int steps) {
  const __m256d a = _mm256_set1_pd(double(m[0]));
  const __m256d b = _mm256_set1_pd(double(m[1]));
  const __m256d c = _mm256_set1_pd(double(m[2]));
  const __m256d d = _mm256_set1_pd(double(m[3]));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d u = _mm256_loadu_pd(x + i);
    __m256d v = _mm256_loadu_pd(y + i);
    for (int s = 0; s < steps; ++s) {
      __m256d nu = _mm256_add_pd(_mm256_mul_pd(a, u), _mm256_mul_pd(b, v));
      __m256d nv = _mm256_add_pd(_mm256_mul_pd(c, u), _mm256_mul_pd(d, v));
      nu = _mm256_sub_pd(nu, _mm256_floor_pd(nu));
      nv = _mm256_sub_pd(nv, _mm256_floor_pd(nv));
      u = _mm256_blendv_pd(nu, zero, _mm256_cmp_pd(nu, one, _CMP_GE_OQ));
      v = _mm256_blendv_pd(nv, zero, _mm256_cmp_pd(nv, one, _CMP_GE_OQ));
    }
    _mm256_storeu_pd(x + i, u);
    _mm256_storeu_pd(y + i, v);
  }
  if (i < n) scalar::linear_step_mod1(x + i, y + i, n - i, m, steps);
}

__attribute__((target("avx2"))) double avx2::max_pair_dist(const double* x, const double* y,
                                                           std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const __m256d xi = _mm256_set1_pd(x[i]);
    const __m256d yi = _mm256_set1_pd(y[i]);
    __m256d vbest = _mm256_setzero_pd();
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      __m256d dx = _mm256_sub_pd(xi, _mm256_loadu_pd(x + j));
      __m256d dy = _mm256_sub_pd(yi, _mm256_loadu_pd(y + j));
      __m256d s = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      vbest = _mm256_max_pd(vbest, s);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vbest);
    for (double l : lanes)
      if (l > best) best = l;
    for (; j < n; ++j) {
      double dx = x[i] - x[j];
      double dy = y[i] - y[j];
      double s = dx * dx + dy * dy;
      if (s > best) best = s;
    }
  }
  return std::sqrt(best);
}

// ---- dispatch ----

void torus_dist_to(const double* ax, const double* ay, std::size_t n, double bx, double by,
                   double* out) {
  if (active_isa() == Isa::avx2)
    avx2::torus_dist_to(ax, ay, n, bx, by, out);
  else
    scalar::torus_dist_to(ax, ay, n, bx, by, out);
}

void linear_step_mod1(double* x, double* y, std::size_t n, const std::int64_t m[4], int steps) {
  if (active_isa() == Isa::avx2)
    avx2::linear_step_mod1(x, y, n, m, steps);
  else
    scalar::linear_step_mod1(x, y, n, m, steps);
}

double max_pair_dist(const double* x, const double* y, std::size_t n) {
  if (active_isa() == Isa::avx2) return avx2::max_pair_dist(x, y, n);
  return scalar::max_pair_dist(x, y, n);
}

}  // namespace cwdyn::kernels
