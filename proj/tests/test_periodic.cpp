#include <cmath>
#include <limits>

#include "cwdyn/periodic.hpp"
#include "doctest.h"

using namespace cwdyn;

TEST_CASE("select_k examples") {
  CHECK(select_k(2, 0.5, 1) == 2);
  CHECK(select_k(2, 0.5, 0.1) == 5);
  CHECK(select_k(2, 0.5, std::numeric_limits<double>::infinity()) == 2);
  CHECK(select_k(3, 0.9, 1e-3) == 76);
  for (double a : {1.5, 7.29, 40.0})
    for (double b : {0.3, 0.93})
      for (double e : {1e-4, 0.05, 2.0}) {
        int k = select_k(a, b, e);
        double r = a * std::pow(b, k);
        CHECK(r / (1 - r) <= e);
        CHECK(std::log(a) + k * std::log(b) < 0);
        double r1 = a * std::pow(b, k - 1);
        CHECK((r1 >= 1 || r1 / (1 - r1) > e));
      }
  CHECK_THROWS_AS(select_k(0.5, 0.5, 1), CwError);
}

TEST_CASE("katok params chain") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto k = constants_from(0.25, 2);
  auto kp = katok_params(cat, 1e-2, k);
  CHECK(kp.c < kp.alpha_target / 2);
  CHECK(kp.delta == kp.delta_prime / 2);
  CHECK(kp.gamma < kp.delta / 2);
  CHECK(kp.beta < kp.gamma / 3);
  CHECK(4 * std::pow(k.lambda, -kp.k0) * kp.d_c <= kp.beta);
  double r = (1 + kp.delta) * (1 + kp.delta) * 4 * std::pow(k.lambda, -kp.k0);
  CHECK(r / (1 - r) <= kp.beta);
  CHECK(kp.k0 == 71);
  CHECK(kp.d_c <= 1.0);
  CHECK(kp.return_radius > 0.0);
  CHECK(kp.return_radius < 1e-9);
}

TEST_CASE("find_return examples") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto r0 = find_return(cat, make_point(cat, 0, 0), 1e-3, 7, 10000);
  CHECK(r0.dist == 0.0);
  CHECK(r0.k == 7);
  auto r1 = find_return(cat, rational_point(cat, 1, 2, 5), 0.3, 9, 10000);
  CHECK(r1.dist < 1e-15);
  CHECK(r1.period == 2);
  CHECK(r1.k == 10);
  Point p = make_point(cat, 0.3712, 0.8254);
  auto r2 = find_return(cat, p, 1e-2, 10, 10000);
  CHECK(r2.dist < 1e-2);
  CHECK(r2.k >= 10);
  CHECK(r2.k % r2.period == 0);
  CHECK(verify_periodic(cat, r2.y, r2.k, 1e-12).residual == 0.0);
  CHECK_THROWS_AS(find_return(cat, p, 1e-9, 10, 10000), CwError);
  SystemModel pa = make_model(ModelKind::sphere_pa);
  CHECK(rational_period(pa, rational_point(pa, 1, 2, 5)) == 1);
}

TEST_CASE("verify_periodic examples") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto v0 = verify_periodic(cat, make_point(cat, 0, 0), 1, 1e-12);
  CHECK(v0.ok);
  CHECK(v0.residual == 0.0);
  Point p = rational_point(cat, 1, 2, 5);
  CHECK(verify_periodic(cat, p, 2, 1e-12).ok);
  CHECK(verify_periodic(cat, p, 2, 1e-12).residual < 1e-12);
  CHECK_FALSE(verify_periodic(cat, p, 3, 1e-12).ok);
  CHECK(verify_periodic(cat, make_point(cat, 0.2, 0.4), 2, 1e-12).ok);
}

TEST_CASE("katok iteration") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto k = constants_from(0.25, 2);
  auto kp = katok_params(cat, 1e-2, k);
  Point per = rational_point(cat, 1, 2, 5);
  auto fixed = katok_iterate(cat, per, 142, kp, k);
  CHECK(fixed.converged);
  CHECK(fixed.steps.size() == 1);
  CHECK(chart_distance(fixed.q, per) == 0.0);

  auto run = katok_iterate(cat, make_point(cat, 0.201, 0.398), 2, kp, k);
  CHECK(run.converged);
  CHECK(run.envelope_ok);
  CHECK(chart_distance(run.q, make_point(cat, 0.2, 0.4)) < 1e-9);
  const double bound = (1 + kp.delta) * (1 + kp.delta) * 4 * std::pow(k.lambda, -2.0);
  const double L2 = std::pow((3 + std::sqrt(5.0)) / 2, -2);
  for (std::size_t i = 1; i < run.steps.size(); ++i) {
    if (run.steps[i - 1].residual < 1e-12) break;
    double ratio = run.steps[i].residual / run.steps[i - 1].residual;
    CHECK(ratio <= bound);
    CHECK(ratio == doctest::Approx(L2).epsilon(1e-3));
  }
  CHECK_THROWS_AS(katok_iterate(cat, make_point(cat, 0.201, 0.398), 40, kp, k), CwError);
}

TEST_CASE("density on a small seed grid") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto k = constants_from(0.25, 2);
  auto kp = katok_params(cat, 1e-2, k);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) {
      Point p = make_point(cat, (i + 0.6180339887498949) / 5, (j + 0.41421356237309515) / 5);
      auto r = find_periodic_near(cat, p, kp, k);
      CHECK(r.ok);
      CHECK(r.widened);
      CHECK(r.katok.envelope_ok);
      CHECK(nearest_rational(r.q, 200).second < 1e-6);
    }
}

TEST_CASE("nearest rational") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto [q, d] = nearest_rational(make_point(cat, 0.2, 0.4 + 1e-9), 200);
  CHECK(q.den == 5);
  CHECK(d == doctest::Approx(1e-9).epsilon(1e-6));
}
