#include <cmath>
#include <random>

#include "cwdyn/cwmetric.hpp"
#include "doctest.h"

using namespace cwdyn;

TEST_CASE("constants") {
  auto k1 = constants_from(0.25, 1);
  CHECK(k1.alpha == 2.0);
  CHECK(k1.n0 == 3);
  CHECK(k1.k == doctest::Approx(2.0));
  CHECK(k1.lambda == doctest::Approx(std::cbrt(2.0)).epsilon(1e-15));
  CHECK(std::pow(k1.lambda, -k1.horizon) < 1e-12);
  CHECK(std::pow(k1.lambda, -(k1.horizon - 1)) >= 1e-12);
  auto k2 = constants_from(0.25, 2);
  CHECK(k2.alpha == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(k2.n0 == 5);
  CHECK(std::pow(k2.alpha, 4) / 4 == doctest::Approx(1.0));
  CHECK(k2.k == doctest::Approx(std::pow(k2.alpha, 5) / 4).epsilon(1e-14));
  CHECK(k2.lambda == doctest::Approx(std::pow(2.0, 0.1)).epsilon(1e-15));
  CHECK(k2.xi == doctest::Approx(1.0 / (4 * k2.alpha * std::pow(k2.lambda, 4))).epsilon(1e-15));
  CHECK(k2.horizon == 399);
  CHECK_THROWS_AS(constants_from(0.25, 0), CwError);
}

TEST_CASE("calibrate") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto s = calibrate_report(cat, 0.25, 0, 1, CalibrationMode::structured);
  CHECK(s.consts.m == 1);
  CHECK(s.consts.lambda == doctest::Approx(std::cbrt(2.0)));
  auto f = calibrate_report(cat, 0.25, 2000, 7);
  CHECK(f.consts.m == 2);
  CHECK(f.random_m == 2);
  CHECK(calibrate(cat, 0.25, 2000, 7).m == calibrate(cat, 0.25, 2000, 7).m);
  SystemModel ns = make_model(ModelKind::north_south);
  CHECK_THROWS_AS(calibrate(ns, 0.25, 10), CwError);
}

TEST_CASE("capital_n and rho examples") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto k = constants_from(0.25, 1);
  Point x = make_point(cat, 0.3, 0.6);
  auto sgl = singleton(x);
  CHECK(capital_n(cat, sgl, k).infinite);
  CHECK(rho(cat, sgl, k) == 0.0);
  auto un = local_arc(cat, x, ArcKind::unstable, 0.005, 2);
  auto st = local_arc(cat, x, ArcKind::stable, 0.005, 2);
  CHECK(capital_n(cat, un, k).n == 4);
  CHECK(capital_n(cat, st, k).n == 4);
  CHECK(rho(cat, un, k) == 0.0625);
  auto big = polyline({make_point(cat, 0.1, 0.1), make_point(cat, 0.1, 0.4)}, 0, 1);
  CHECK(capital_n(cat, big, k).n == 0);
  CHECK(rho(cat, big, k) == 1.0);
}

TEST_CASE("p_metric") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto k = constants_from(0.25, 2);
  Point x = make_point(cat, 0.3, 0.6);
  CHECK(p_metric(cat, singleton(x), k, 4) == 0.0);
  auto un = local_arc(cat, x, ArcKind::unstable, 0.02, 3);
  CHECK(p_metric(cat, un, k, 0) == rho(cat, un, k));
  double prev = 2.0;
  for (int d = 0; d <= 5; ++d) {
    double p = p_metric(cat, un, k, d);
    CHECK(p <= prev);
    CHECK(p <= rho(cat, un, k));
    CHECK(rho(cat, un, k) <= 4 * p);
    prev = p;
  }
}

namespace {
MarkedContinuum random_arc(const SystemModel& sys, std::mt19937_64& rng, double top = 0.3,
                           double decades = 3.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  Vec2 v{u(rng), u(rng)};
  int n = 2 + int(u(rng) * 4);
  double scale = std::pow(10.0, -decades * u(rng)) * top;
  for (int i = 0; i < n; ++i) {
    pts.push_back(make_point(sys, mod1(v.x), mod1(v.y)));
    double th = 6.283185307179586 * u(rng);
    v = v + (scale / n) * Vec2{std::cos(th), std::sin(th)};
  }
  std::size_t a = std::size_t(u(rng) * n), b = std::size_t(u(rng) * n);
  return polyline(pts, a, b);
}
}  // namespace

TEST_CASE("sandwich and bounds on random arcs") {
  std::mt19937_64 rng(11);
  for (ModelKind kind : {ModelKind::cat_map, ModelKind::sphere_pa}) {
    SystemModel sys = make_model(kind);
    auto k = constants_from(0.25, 2);
    for (int i = 0; i < 40; ++i) {
      auto C = random_arc(sys, rng);
      MetricEvaluator ev(sys, C, k, 2);
      MetricEvaluator r0(sys, C, k, 0);
      double rh0 = r0.piece_rho(0, r0.cut_count() - 1, 0);
      double rh = ev.piece_rho(0, ev.cut_count() - 1, 0);
      CHECK(rh >= rh0);
      double p = ev.p(0), dp = ev.d_prime(0);
      auto d = ev.d(0);
      INFO(std::string(model_name(kind)), " ", i);
      CHECK(p <= rh);
      CHECK(rh <= 4 * p);
      CHECK(dp >= p);
      CHECK(dp <= 1.0);
      CHECK(d.value >= dp);
      CHECK(d.value > 0.0);
      auto rev = C;
      std::swap(rev.mark_p, rev.mark_q);
      CHECK(d_metric(sys, rev, k, 2).value == d.value);
    }
  }
}

TEST_CASE("fathi prime and self-similarity") {
  SystemModel cat = make_model(ModelKind::cat_map);
  auto k = constants_from(0.25, 2);
  std::mt19937_64 rng(5);
  int tested = 0;
  for (int i = 0; i < 60; ++i) {
    auto C = random_arc(cat, rng, 1e-12, 3.0);
    MetricEvaluator ev(cat, C, k, 2);
    double dp = ev.d_prime(0);
    if (dp <= k.xi) {
      CHECK(std::max(ev.d_prime(1), ev.d_prime(-1)) >= k.lambda * dp * (1 - 1e-12));
    }
    double d = ev.d(0).value;
    if (d <= k.xi) {
      ++tested;
      double m = std::max(ev.d(1).value, ev.d(-1).value);
      CHECK(std::abs(m - k.lambda * d) <= 1e-6 * k.lambda * d + std::pow(k.lambda, -k.horizon));
    }
  }
  CHECK(tested > 10);
  Point x = make_point(cat, 0.41, 0.17);
  auto st = local_arc(cat, x, ArcKind::stable, 5e-15, 5);
  MetricEvaluator ev(cat, st, k, 3);
  double d0 = ev.d(0).value;
  REQUIRE(d0 <= k.xi);
  for (int j = 1; j <= 8; ++j) {
    double dj = ev.d(j).value;
    CHECK(dj == doctest::Approx(d0 * std::pow(k.lambda, -j)).epsilon(1e-6));
  }
}

TEST_CASE("union subadditivity on slices of one arc") {
  std::mt19937_64 rng(3);
  SystemModel cat = make_model(ModelKind::cat_map);
  auto k = constants_from(0.25, 2);
  for (int i = 0; i < 20; ++i) {
    auto P = random_arc(cat, rng);
    std::size_t n = P.size();
    if (n < 3) continue;
    std::vector<Point> va(P.vertices.begin(), P.vertices.begin() + long(n - 1));
    std::vector<Point> vb(P.vertices.begin() + 1, P.vertices.end());
    std::size_t b = 1 + (n - 3) / 2;
    auto A = polyline(va, 0, b);
    auto B = polyline(vb, b - 1, vb.size() - 1);
    auto U = polyline(P.vertices, 0, n - 1);
    double du = d_metric(cat, U, k, 2).value;
    double da = d_metric(cat, A, k, 2).value, db = d_metric(cat, B, k, 2).value;
    CHECK(du <= da + db + 1e-9);
  }
}

TEST_CASE("sphere-pA evaluator matches image") {
  SystemModel pa = make_model(ModelKind::sphere_pa);
  auto k = constants_from(0.25, 2);
  auto C = local_arc(pa, make_point(pa, 0.5, 0.5), ArcKind::unstable, 0.01, 4);
  MetricEvaluator ev(pa, C, k, 2);
  for (int j : {-3, -1, 1, 2}) {
    auto img = image(pa, C, j);
    CHECK(MetricEvaluator(pa, img, k, 2).d(0).value ==
          doctest::Approx(ev.d(j).value).epsilon(1e-9));
  }
}
