#include <chrono>
#include <cmath>
#include <random>

#include "cwdyn/holonomy.hpp"
#include "doctest.h"

using namespace cwdyn;

TEST_CASE("holonomy params") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto hp = holonomy_params(cat);
  CHECK(hp.eps == 0.125);
  CHECK(hp.delta == doctest::Approx(0.0625));
  CHECK(hp.delta < hp.eps);
}

TEST_CASE("holonomy trivial and errors") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto hp = holonomy_params(cat);
  Point x = make_point(cat, 0.3, 0.7);
  auto r = holonomy(cat, x, x, x, ArcKind::stable, hp);
  REQUIRE(r.size() == 1);
  CHECK(chart_distance(r[0], x) < 1e-12);
  CHECK_THROWS_AS(holonomy(cat, x, make_point(cat, 0.5, 0.7), x, ArcKind::stable, hp), CwError);
  CHECK_THROWS_AS(holonomy(cat, x, x, make_point(cat, 0.31, 0.7), ArcKind::stable, hp), CwError);
}

TEST_CASE("cat holonomy matches closed form") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto hp = holonomy_params(cat);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    Vec2 xl{u(rng), u(rng)};
    Point x = make_point(cat, xl.x, xl.y);
    Vec2 off{u(rng) - 0.5, u(rng) - 0.5};
    Point y = project(cat, xl + (0.9 * hp.delta * u(rng) / norm(off)) * off);
    for (ArcKind k : {ArcKind::stable, ArcKind::unstable}) {
      Vec2 e = k == ArcKind::stable ? cat.e_s : cat.e_u;
      Point z = project(cat, xl + (0.9 * hp.delta * (2 * u(rng) - 1)) * e);
      auto r = holonomy(cat, x, y, z, k, hp);
      REQUIRE(r.size() == 1);
      worst = std::max(worst, chart_distance(r[0], closed_form_holonomy(cat, y, z, k)));
    }
  }
  CHECK(worst < 1e-10);
  // frozen linear solve: z + a e_u with a = <y - z, e_u>
  Point y = make_point(cat, 0.52, 0.31), z = make_point(cat, 0.5, 0.3);
  double a = 0.02 * cat.e_u.x + 0.01 * cat.e_u.y;
  Point w = closed_form_holonomy(cat, y, z, ArcKind::stable);
  CHECK(w.c.x == doctest::Approx(0.5 + a * cat.e_u.x).epsilon(1e-14));
  CHECK(w.c.y == doctest::Approx(0.3 + a * cat.e_u.y).epsilon(1e-14));
}

TEST_CASE("sphere-pA holonomy near a spine has two points") {
  SystemModel pa = make_model(ModelKind::sphere_pa);
  auto hp = holonomy_params(pa);
  CHECK(hp.delta > 0.01);
  Vec2 h{0.5, 0.5};
  Point x = project(pa, h + 0.004 * pa.e_u + 0.003 * pa.e_s);
  Point y = project(pa, h + 0.002 * pa.e_u - 0.004 * pa.e_s);
  auto r = holonomy(pa, x, y, x, ArcKind::stable, hp);
  CHECK(r.size() == 2);
  Point far_x = make_point(pa, 0.23, 0.31);
  Point far_y = project(pa, far_x.c + Vec2{0.003, -0.002});
  CHECK(holonomy(pa, far_x, far_y, far_x, ArcKind::stable, hp).size() == 1);
}

TEST_CASE("rectangle") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto hp = holonomy_params(cat);
  auto k = constants_from(0.25, 2);
  Vec2 pl{0.3, 0.4};
  Point p = make_point(cat, pl.x, pl.y);
  MarkedContinuum Cp;
  Cp.vertices = {p, project(cat, pl + 0.01 * cat.e_u)};
  Cp.lift = {pl, pl + 0.01 * cat.e_u};
  Cp.mark_q = 1;
  auto degenerate = build_rectangle(cat, singleton(p), Cp.q(), Cp, hp, k);
  REQUIRE(degenerate.ok);
  CHECK(chart_distance(degenerate.rect.corners[3], Cp.q()) < 1e-12);
  CHECK(degenerate.rect.dCstar == 0.0);
  CHECK(degenerate.rect.dCstarstar == doctest::Approx(degenerate.rect.dCprime).epsilon(1e-12));

  MarkedContinuum C;
  C.vertices = {p, project(cat, pl + 0.003 * cat.e_s)};
  C.lift = {pl, pl + 0.003 * cat.e_s};
  C.mark_q = 1;
  auto r = build_rectangle(cat, C, Cp.q(), Cp, hp, k);
  REQUIRE(r.ok);
  CHECK(r.rect.branches == 1);
  Point qs = project(cat, pl + 0.01 * cat.e_u + 0.003 * cat.e_s);
  CHECK(chart_distance(r.rect.corners[3], qs) < 1e-12);
  CHECK(r.rect.dCstar == r.rect.dC);
  CHECK(r.rect.dCstarstar == r.rect.dCprime);
}

TEST_CASE("pseudo-isometry probe on the cat map") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto hp = holonomy_params(cat);
  auto k = constants_from(0.25, 2);
  auto t0 = std::chrono::steady_clock::now();
  auto rep = pseudo_isometry_probe(cat, 400, {1e-3, 1e-2, 0.1, 1.0}, hp, k);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("probe seconds: " << secs);
  CHECK(rep.obstructions == 0);
  CHECK(rep.monotone_violations == 0);
  CHECK(rep.rows[0].samples > 20);
  for (auto& row : rep.rows) {
    CHECK(row.max_dev_stable <= 1e-6);
    CHECK(row.max_dev_unstable <= 1e-6);
  }
}

TEST_CASE("isometry check") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto hp = holonomy_params(cat);
  auto k = constants_from(0.25, 2);
  auto rep = isometry_check(cat, 100, hp, k);
  CHECK(rep.success_rate() == 1.0);
  SystemModel pa = make_model(ModelKind::sphere_pa);
  auto rp = isometry_check(pa, 50, holonomy_params(pa), k);
  CHECK(rp.samples == 50);
}
