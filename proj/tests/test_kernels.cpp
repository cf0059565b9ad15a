#include <random>
#include <vector>

#include "cwdyn/kernels.hpp"
#include "doctest.h"

using namespace cwdyn::kernels;

namespace {
std::vector<double> uniform(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}
}  // namespace

TEST_CASE("torus distance kernel: scalar reference values") {
  double ax[3] = {0.1, 0.0, 0.25};
  double ay[3] = {0.0, 0.0, 0.75};
  double out[3];
  scalar::torus_dist_to(ax, ay, 3, 0.9, 0.0, out);
  CHECK(out[0] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(out[2] == doctest::Approx(std::sqrt(0.35 * 0.35 + 0.25 * 0.25)).epsilon(1e-15));
}

TEST_CASE("linear step kernel: cat map reference values") {
  const std::int64_t m[4] = {2, 1, 1, 1};
  double x[1] = {0.1}, y[1] = {0.2};
  scalar::linear_step_mod1(x, y, 1, m, 1);
  CHECK(x[0] == doctest::Approx(0.4));
  CHECK(y[0] == doctest::Approx(0.3));
}

TEST_CASE("max pair distance kernel: reference values") {
  double x[4] = {0, 1, 0, 0.5};
  double y[4] = {0, 0, 2, 0.5};
  CHECK(scalar::max_pair_dist(x, y, 4) == doctest::Approx(std::sqrt(5.0)));
  CHECK(scalar::max_pair_dist(x, y, 1) == 0.0);
}

TEST_CASE("avx2 variants match scalar bitwise") {
  if (!avx2_available()) {
    MESSAGE("avx2 not available; equivalence skipped");
    return;
  }
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
    auto ax = uniform(n, 1 + n, -2.0, 2.0), ay = uniform(n, 2 + n, -2.0, 2.0);
    std::vector<double> o1(n), o2(n);
    scalar::torus_dist_to(ax.data(), ay.data(), n, 0.3, 0.7, o1.data());
    avx2::torus_dist_to(ax.data(), ay.data(), n, 0.3, 0.7, o2.data());
    CHECK(o1 == o2);

    const std::int64_t m[4] = {2, 1, 1, 1};
    auto x1 = uniform(n, 3 + n, 0.0, 1.0), y1 = uniform(n, 4 + n, 0.0, 1.0);
    auto x2 = x1, y2 = y1;
    scalar::linear_step_mod1(x1.data(), y1.data(), n, m, 7);
    avx2::linear_step_mod1(x2.data(), y2.data(), n, m, 7);
    CHECK(x1 == x2);
    CHECK(y1 == y2);

    CHECK(scalar::max_pair_dist(ax.data(), ay.data(), n) ==
          avx2::max_pair_dist(ax.data(), ay.data(), n));
  }
}

TEST_CASE("dispatch honours forced isa") {
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  reset_isa();
  CHECK(active_isa() == (avx2_available() ? Isa::avx2 : Isa::scalar));
}
