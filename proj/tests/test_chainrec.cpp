#include <algorithm>

#include "cwdyn/chainrec.hpp"
#include "doctest.h"

using namespace cwdyn;

TEST_CASE("identity graph") {
  auto g = build_graph(identity_system(), 16, 0.01);
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    bool loop = false;
    for (auto e = g.offsets[v]; e < g.offsets[v + 1]; ++e) loop = loop || g.targets[e] == v;
    CHECK(loop);
  }
  auto p = analyze(g);
  CHECK(p.classes.size() == 1);  // eps + diagonal joins neighbouring cells
  CHECK(std::all_of(p.labels.begin(), p.labels.end(), [](int l) { return l == 0; }));
}

TEST_CASE("build_graph errors") {
  SystemModel cat = make_model(ModelKind::cat_map);
  CHECK_THROWS_AS(build_graph(cat, 64, 0.0), CwError);
  CHECK_THROWS_AS(build_graph(cat, 64, 0.3), CwError);
  CHECK_THROWS_AS(build_graph(cat, 1, 0.01), CwError);
}

TEST_CASE("cat map and sphere-pA ladders") {
  for (ModelKind k : {ModelKind::cat_map, ModelKind::sphere_pa}) {
    SystemModel s = make_model(k);
    for (int res : {64, 128}) {
      auto g = build_graph(s, res, 1.5 / res);
      auto p = analyze(g);
      CHECK(p.classes.size() == 1);
      CHECK(transitivity_verdict(g, p) == Verdict::transitive_candidate);
      CHECK(g.roles[0] == Role::neither);
      CHECK(g.class_order.empty());
    }
  }
  auto g = build_graph(make_model(ModelKind::cat_map), 128, 0.05);
  CHECK(chain_classes(g).classes.size() == 1);
  CHECK(build_graph(make_model(ModelKind::sphere_pa), 64, 0.02).node_count() == 2048);
}

TEST_CASE("north-south: repeller below attractor") {
  SystemModel ns = make_model(ModelKind::north_south);
  auto g = build_graph(ns, 128, 0.01);
  auto p = analyze(g);
  REQUIRE(p.classes.size() == 2);
  CHECK(transitivity_verdict(g, p) == Verdict::not_transitive);
  int south = g.center(p.classes[0].front()).y < 0.5 ? 0 : 1;
  CHECK(g.roles[std::size_t(south)] == Role::attractor);
  CHECK(g.roles[std::size_t(1 - south)] == Role::repeller);
  REQUIRE(g.class_order.size() == 1);
  CHECK(g.class_order[0] == std::make_pair(1 - south, south));
  CHECK(invariance_violations(g, p) == 0);
  for (auto v : p.classes[std::size_t(south)]) CHECK(g.center(v).y < 0.1);
  for (auto v : p.classes[std::size_t(1 - south)]) CHECK(g.center(v).y > 0.9);
}

TEST_CASE("synthetic: repeller below two incomparable attractors") {
  auto g = build_graph(synthetic_system(), 128, 0.01);
  auto p = analyze(g);
  REQUIRE(p.classes.size() == 3);
  std::vector<int> att, rep;
  for (std::size_t c = 0; c < 3; ++c) (g.roles[c] == Role::attractor ? att : rep).push_back(int(c));
  REQUIRE(att.size() == 2);
  REQUIRE(rep.size() == 1);
  auto has = [&](int a, int b) {
    return std::find(g.class_order.begin(), g.class_order.end(), std::make_pair(a, b)) !=
           g.class_order.end();
  };
  CHECK(has(rep[0], att[0]));
  CHECK(has(rep[0], att[1]));
  CHECK_FALSE(has(att[0], att[1]));
  CHECK_FALSE(has(att[1], att[0]));
  double xr = g.center(p.classes[std::size_t(rep[0])].front()).x;
  CHECK(xr > 0.4);
  CHECK(xr < 0.6);
}

TEST_CASE("labels do not depend on traversal") {
  SystemModel ns = make_model(ModelKind::north_south);
  auto g1 = build_graph(ns, 64, 0.01);
  auto g2 = build_graph(ns, 64, 0.01);
  CHECK(chain_classes(g1).labels == chain_classes(g2).labels);
}

TEST_CASE("chain transport on the cat map") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto g = build_graph(cat, 64, 1.5 / 64);
  auto p = chain_classes(g);
  auto t = chain_transport(cat, make_point(cat, 0.3, 0.2), 0.05, 2, g, p);
  CHECK(t.chain.size() > 2);
  CHECK(t.max_gap <= 0.05 + 1e-12);
  CHECK(t.endpoint_class == 0);
  CHECK_THROWS_AS(chain_transport(make_model(ModelKind::sphere_pa),
                                  make_point(make_model(ModelKind::sphere_pa), 0.3, 0.2), 0.05,
                                  2, g, p),
                  CwError);
}
