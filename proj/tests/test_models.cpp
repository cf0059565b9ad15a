#include <random>

#include "cwdyn/models.hpp"
#include "doctest.h"

using namespace cwdyn;

namespace {
double lifted_length(const MarkedContinuum& c) {
  auto l = lift_polyline(c.vertices);
  return norm(l.back() - l.front());
}
}  // namespace

TEST_CASE("cat map iterate examples") {
  SystemModel cat = make_model(ModelKind::cat_map);
  Point o = iterate(cat, make_point(cat, 0, 0), 5);
  CHECK(o.c.x == 0.0);
  CHECK(o.c.y == 0.0);

  Point r = iterate(cat, rational_point(cat, 1, 2, 5), 2);
  CHECK(r.q.nx == 1);
  CHECK(r.q.ny == 2);
  CHECK(r.q.den == 5);
  Point f = iterate(cat, make_point(cat, 0.2, 0.4), 2);
  CHECK(f.c.x == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(f.c.y == doctest::Approx(0.4).epsilon(1e-12));

  Point s = iterate(cat, make_point(cat, 0.1, 0.2), 1);
  CHECK(s.c.x == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(s.c.y == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("iterate rejects n beyond the horizon") {
  SystemModel cat = make_model(ModelKind::cat_map);
  CHECK_THROWS_AS(iterate(cat, make_point(cat, 0.1, 0.1), 61), CwError);
  CHECK_NOTHROW(iterate(cat, make_point(cat, 0.1, 0.1), -60));
}

TEST_CASE("forward then backward is the identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (ModelKind k : {ModelKind::cat_map, ModelKind::sphere_pa, ModelKind::north_south}) {
    SystemModel sys = make_model(k);
    for (int i = 0; i < 200; ++i) {
      Point x = make_point(sys, u(rng), 0.05 + 0.9 * u(rng));
      long n = 1 + long(i % 10);
      Point y = iterate(sys, iterate(sys, x, n), -n);
      CHECK(distance(sys, x, y) < 1e-10);
    }
  }
}

TEST_CASE("matrix validation") {
  CHECK_THROWS_AS(make_model(ModelKind::cat_map, {1, 1, 0, 1}), CwError);
  CHECK_THROWS_AS(make_model(ModelKind::cat_map, {2, 0, 0, 1}), CwError);
  SystemModel m = make_model(ModelKind::cat_map, {0, 1, 1, 1});
  CHECK(m.expansion() == doctest::Approx(1.6180339887498949));
}

TEST_CASE("eigen data of the default cat map") {
  SystemModel cat = make_model(ModelKind::cat_map);
  const double L = (3 + std::sqrt(5.0)) / 2;
  CHECK(cat.mu_u == doctest::Approx(L).epsilon(1e-15));
  CHECK(cat.mu_s == doctest::Approx(1 / L).epsilon(1e-14));
  CHECK(cat.e_u.y / cat.e_u.x == doctest::Approx((std::sqrt(5.0) - 1) / 2));
  CHECK(cat.e_s.y / cat.e_s.x == doctest::Approx(-(1 + std::sqrt(5.0)) / 2));
}

TEST_CASE("distance examples") {
  SystemModel cat = make_model(ModelKind::cat_map);
  CHECK(distance(cat, make_point(cat, 0.1, 0), make_point(cat, 0.9, 0)) ==
        doctest::Approx(0.2).epsilon(1e-14));
  Point a = make_point(cat, 0.3, 0.6);
  CHECK(distance(cat, a, a) == 0.0);
  SystemModel pa = make_model(ModelKind::sphere_pa);
  CHECK(distance(pa, make_point(pa, 0.1, 0.1), make_point(pa, 0.9, 0.9)) < 1e-15);
  CHECK_THROWS_AS(distance(cat, a, make_point(pa, 0.1, 0.1)), CwError);
}

TEST_CASE("distance is a metric on sampled triples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (ModelKind k : {ModelKind::cat_map, ModelKind::sphere_pa, ModelKind::north_south}) {
    SystemModel sys = make_model(k);
    for (int i = 0; i < 500; ++i) {
      Point a = make_point(sys, u(rng), u(rng)), b = make_point(sys, u(rng), u(rng)),
            c = make_point(sys, u(rng), u(rng));
      double ab = distance(sys, a, b), ba = distance(sys, b, a);
      CHECK(ab == ba);
      CHECK(ab >= 0.0);
      CHECK(ab <= distance(sys, a, c) + distance(sys, c, b) + 1e-12);
    }
  }
}

TEST_CASE("sphere quotient representatives are interchangeable") {
  SystemModel pa = make_model(ModelKind::sphere_pa);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    double x = u(rng), y = u(rng);
    Point a = make_point(pa, x, y), b = make_point(pa, -x, -y);
    CHECK(a.c.x == b.c.x);
    CHECK(a.c.y == b.c.y);
    Point fa = iterate(pa, a, 3);
    Point fb = iterate(pa, b, 3);
    CHECK(distance(pa, fa, fb) < 1e-10);
  }
}

TEST_CASE("local arc on the cat map") {
  SystemModel cat = make_model(ModelKind::cat_map);
  Point x = make_point(cat, 0.3, 0.3);
  MarkedContinuum arc = local_arc(cat, x, ArcKind::stable, 0.2, 9);
  REQUIRE(arc.size() == 9);
  CHECK(lifted_length(arc) == doctest::Approx(0.4).epsilon(1e-12));
  // endpoints frozen from the eigendirection (1, -(1+sqrt5)/2)
  CHECK(arc.vertices.front().c.x == doctest::Approx(0.19485377).epsilon(1e-7));
  CHECK(arc.vertices.front().c.y == doctest::Approx(0.47013016).epsilon(1e-7));
  CHECK(arc.vertices.back().c.x == doctest::Approx(0.40514623).epsilon(1e-7));
  CHECK(arc.vertices.back().c.y == doctest::Approx(0.12986984).epsilon(1e-7));
  CHECK(arc.vertices[4].c.x == x.c.x);

  MarkedContinuum two = local_arc(cat, x, ArcKind::unstable, 0.2, 2);
  CHECK(two.size() == 2);
  CHECK(lifted_length(two) == doctest::Approx(0.4).epsilon(1e-12));
  MarkedContinuum even = local_arc(cat, x, ArcKind::unstable, 0.2, 8);
  CHECK(even.size() == 9);

  CHECK_THROWS_AS(local_arc(cat, x, ArcKind::stable, 0.25, 9), CwError);
}

TEST_CASE("hyperbolicity witness: unstable arcs stretch by the eigenvalue") {
  SystemModel cat = make_model(ModelKind::cat_map);
  MarkedContinuum arc = local_arc(cat, make_point(cat, 0.61, 0.17), ArcKind::unstable, 0.02, 5);
  auto l = lift_polyline(arc.vertices);
  Vec2 d = l.back() - l.front();
  Vec2 fd = apply_linear(cat, d, 1);
  CHECK(norm(fd) / norm(d) == doctest::Approx(cat.mu_u).epsilon(1e-9));
}

TEST_CASE("sphere-pA arcs fold at spines") {
  SystemModel pa = make_model(ModelKind::sphere_pa);
  Point o = make_point(pa, 0, 0);
  MarkedContinuum arc = local_arc(pa, o, ArcKind::stable, 0.2, 9);
  CHECK(chart_distance(arc.vertices.front(), o) == 0.0);
  CHECK(chart_distance(arc.vertices.back(), o) == doctest::Approx(0.2).epsilon(1e-12));

  Point g = make_point(pa, 0.3, 0.3);
  MarkedContinuum reg = local_arc(pa, g, ArcKind::stable, 0.2, 9);
  CHECK(chart_distance(reg.vertices[4], g) == 0.0);
  CHECK(chart_distance(reg.vertices.front(), g) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("is_spine examples and census") {
  SystemModel cat = make_model(ModelKind::cat_map);
  SystemModel pa = make_model(ModelKind::sphere_pa);
  CHECK_FALSE(is_spine(cat, make_point(cat, 0, 0), 0.1, 1e-9));
  CHECK_FALSE(is_spine(cat, make_point(cat, 0.5, 0.5), 0.1, 1e-9));
  CHECK(is_spine(pa, make_point(pa, 0.5, 0.5), 0.1, 1e-9));
  CHECK_FALSE(is_spine(pa, make_point(pa, 0.3, 0.3), 0.1, 1e-9));
  int count = 0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      if (is_spine(pa, make_point(pa, i / 16.0, j / 16.0), 0.1, 1e-9)) ++count;
  // grid points double-count quotient classes; spines are their own mirror images
  CHECK(count == 4);
  CHECK(sphere_spines(pa).size() == 4);
}

TEST_CASE("north-south poles") {
  SystemModel ns = make_model(ModelKind::north_south);
  Point north = make_point(ns, 0.3, 1.0), south = make_point(ns, 0.7, 0.0);
  CHECK(iterate(ns, north, 7).c.y == 1.0);
  CHECK(iterate(ns, south, -7).c.y == 0.0);
  Point mid = make_point(ns, 0.25, 0.5);
  CHECK(iterate(ns, mid, 1).c.y < 0.5);
  CHECK(iterate(ns, mid, 1).c.x == 0.25);
  CHECK_THROWS_AS(local_arc(ns, mid, ArcKind::stable, 0.1, 3), CwError);
}
