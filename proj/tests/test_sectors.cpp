#include <algorithm>

#include "cwdyn/sectors.hpp"
#include "doctest.h"

using namespace cwdyn;

namespace {

MarkedContinuum path(const SystemModel& s, std::vector<Vec2> v) {
  std::vector<Point> pts;
  for (Vec2 p : v) pts.push_back(make_point(s, p.x, p.y));
  return polyline(pts, 0, pts.size() - 1);
}

// lens between (0.4, 0.5) and (0.6, 0.5); c1, c2 are the first continuation steps past a1
SectorRecord lens(const SystemModel& s, Vec2 c1, Vec2 c2) {
  SectorRecord r;
  r.a1 = make_point(s, 0.4, 0.5);
  r.a2 = make_point(s, 0.6, 0.5);
  r.boundary_s = path(s, {{0.4, 0.5}, {0.5, 0.6}, {0.6, 0.5}});
  r.boundary_u = path(s, {{0.4, 0.5}, {0.5, 0.4}, {0.6, 0.5}});
  r.ext_s = path(s, {c1, {0.4, 0.5}, {0.5, 0.6}, {0.6, 0.5}, {0.65, 0.45}});
  r.ext_u = path(s, {c2, {0.4, 0.5}, {0.5, 0.4}, {0.6, 0.5}, {0.65, 0.55}});
  return r;
}

int spines_inside(const SystemModel& s, const SectorRecord& r) {
  int n = 0;
  for (const auto& h : sphere_spines(s)) n += sector_contains(s, r, h) ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("spine census") {
  SystemModel pa = make_model(ModelKind::sphere_pa);
  auto sp = enumerate_spines(pa, 0.1, 16);
  REQUIRE(sp.size() == 4);
  for (const auto& h : sphere_spines(pa))
    CHECK(std::any_of(sp.begin(), sp.end(), [&](const Point& x) { return chart_distance(x, h) < 1e-12; }));
  CHECK(enumerate_spines(make_model(ModelKind::cat_map), 0.1, 16).empty());
  CHECK_THROWS_AS(enumerate_spines(pa, 0.1, 15), CwError);
  CHECK_THROWS_AS(enumerate_spines(make_model(ModelKind::north_south), 0.1, 16), CwError);
}

TEST_CASE("polyline fixtures") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto inward = lens(cat, {0.47, 0.5}, {0.47, 0.5});
  CHECK(classify_sector(cat, inward) == SectorKind::non_regular);
  auto mirrored = lens(cat, {0.33, 0.5}, {0.33, 0.5});
  CHECK(classify_sector(cat, mirrored) == SectorKind::regular);
  auto half = lens(cat, {0.35, 0.45}, {0.47, 0.5});
  CHECK(classify_sector(cat, half) == SectorKind::non_regular);
  // continuation runs along the other boundary arc
  auto tangent = lens(cat, {0.45, 0.45}, {0.35, 0.55});
  CHECK_THROWS_AS(classify_sector(cat, tangent), CwError);
  CHECK(sector_contains(cat, mirrored, make_point(cat, 0.5, 0.5)));
  CHECK_FALSE(sector_contains(cat, mirrored, make_point(cat, 0.5, 0.65)));
}

TEST_CASE("find_sectors") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto none = find_sectors(cat, {}, 0.1, 1 << 20, 16);
  CHECK(none.sectors.empty());
  CHECK(none.max_multiplicity <= 1);
  CHECK_FALSE(none.partial);

  SystemModel pa = make_model(ModelKind::sphere_pa);
  auto found = find_sectors(pa, {}, 0.1, 1 << 20, 24);
  CHECK_FALSE(found.partial);
  CHECK(found.max_multiplicity == 2);
  REQUIRE_FALSE(found.sectors.empty());
  for (const auto& r : found.sectors) CHECK(intersect(r.ext_s, r.ext_u).size() == 2);
  auto spines = enumerate_spines(pa, 0.1, 16);
  auto mins = minimal_sectors(pa, found.sectors, spines);
  REQUIRE(mins.size() == 4);
  for (const auto& r : mins) {
    CHECK(r.regular);
    REQUIRE(r.spine);
    CHECK(spines_inside(pa, r) == 1);
    CHECK(sector_contains(pa, r, *r.spine));
    auto rep = sector_parametrization(pa, r, 33);
    CHECK(rep.monotone_violations == 0);
    CHECK(rep.duplicates == 0);
    auto e = enclosing_sector(pa, r, 4);
    CHECK(e.found);
    CHECK(e.clearance > 0);
  }

  auto cut = find_sectors(pa, {}, 0.1, 50, 24);
  CHECK(cut.partial);
  CHECK(cut.pairs == 50);
}

TEST_CASE("spine sector parametrization") {
  SystemModel pa = make_model(ModelKind::sphere_pa);
  Point h = make_point(pa, 0.5, 0.5);
  auto r = spine_sector(pa, h, 0.02, 0.03);
  CHECK(r.regular);
  REQUIRE(r.spine);
  CHECK(spines_inside(pa, r) == 1);
  auto rep = sector_parametrization(pa, r, 33);
  CHECK(rep.f1.size() == 33u * 33u);
  CHECK(rep.monotone_violations == 0);
  CHECK(rep.duplicates == 0);
  CHECK(rep.missing == 0);
  CHECK(chart_distance(rep.f1.front(), r.a1) < 1e-9);
  CHECK(chart_distance(rep.f1.back(), h) < 1e-9);
  CHECK(rep.max_modulus < 0.01);
  // f2 starts on the splitting arcs and ends at the far corner
  CHECK(chart_distance(rep.f2.front(), h) < 1e-9);
  CHECK(chart_distance(rep.f2.back(), r.a2) < 1e-9);

  SystemModel cat = make_model(ModelKind::cat_map);
  CHECK_THROWS_AS(spine_sector(cat, make_point(cat, 0.5, 0.5), 0.02, 0.03), CwError);
}

TEST_CASE("nested enclosing sectors") {
  SystemModel pa = make_model(ModelKind::sphere_pa);
  for (const auto& h : sphere_spines(pa)) {
    auto r = spine_sector(pa, h, 0.015, 0.01);
    auto e1 = enclosing_sector(pa, r, 4);
    REQUIRE(e1.found);
    CHECK(e1.clearance > 0);
    CHECK(e1.sector.regular);
    auto e2 = enclosing_sector(pa, e1.sector, 4);
    REQUIRE(e2.found);
    CHECK(e2.clearance > 0);
    CHECK(sector_area(pa, e2.sector) > sector_area(pa, e1.sector));
    CHECK(sector_area(pa, e1.sector) > sector_area(pa, r));
  }
  SystemModel cat = make_model(ModelKind::cat_map);
  SectorRecord bare;
  CHECK_THROWS_AS(enclosing_sector(cat, bare, 4), CwError);
}
