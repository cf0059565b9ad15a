#pragma once
#include <cstddef>
#include <cstdint>

// Batch kernels. Each entry point has a scalar reference and an AVX2 variant;
// dispatch picks AVX2 when the CPU reports it. Results are bitwise identical.
namespace cwdyn::kernels {

enum class Isa { scalar, avx2 };

Isa active_isa();
bool avx2_available();
// Override dispatch (tests). Requesting avx2 on a machine without it falls back to scalar.
void force_isa(Isa isa);
void reset_isa();
const char* isa_name(Isa isa);

// out[i] = flat torus distance between (ax[i],ay[i]) and (bx,by)
void torus_dist_to(const double* ax, const double* ay, std::size_t n,
                   double bx, double by, double* out);

// x,y <- (a x + b y, c x + d y) mod 1, repeated `steps` times
void linear_step_mod1(double* x, double* y, std::size_t n,
                      const std::int64_t m[4], int steps);

// max Euclidean distance over all pairs of (x[i],y[i]); 0 for n < 2
double max_pair_dist(const double* x, const double* y, std::size_t n);

namespace scalar {
void torus_dist_to(const double* ax, const double* ay, std::size_t n,
                   double bx, double by, double* out);
void linear_step_mod1(double* x, double* y, std::size_t n,
                      const std::int64_t m[4], int steps);
double max_pair_dist(const double* x, const double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
void torus_dist_to(const double* ax, const double* ay, std::size_t n,
                   double bx, double by, double* out);
void linear_step_mod1(double* x, double* y, std::size_t n,
                      const std::int64_t m[4], int steps);
double max_pair_dist(const double* x, const double* y, std::size_t n);
}  // namespace avx2

}  // namespace cwdyn::kernels
