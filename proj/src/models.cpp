#include "cwdyn/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cwdyn {

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::torus: return "torus";
    case Chart::sphere_quotient: return "sphere-quotient";
    case Chart::sphere_geographic: return "sphere-geographic";
  }
  return "?";
}

const char* model_name(ModelKind k) {
  switch (k) {
    case ModelKind::cat_map: return "cat-map";
    case ModelKind::sphere_pa: return "sphere-pA";
    case ModelKind::north_south: return "north-south";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "cat" || s == "cat-map") return ModelKind::cat_map;
  if (s == "sphere-pA" || s == "sphere-pa" || s == "pa") return ModelKind::sphere_pa;
  if (s == "north-south" || s == "ns") return ModelKind::north_south;
  throw CwError(ErrorKind::config, "unknown model kind '" + s + "'");
}

Chart SystemModel::chart() const {
  switch (kind) {
    case ModelKind::cat_map: return Chart::torus;
    case ModelKind::sphere_pa: return Chart::sphere_quotient;
    case ModelKind::north_south: return Chart::sphere_geographic;
  }
  return Chart::torus;
}

namespace {

Vec2 unit_eigvec(const std::array<std::int64_t, 4>& m, double mu) {
  double a = double(m[0]), b = double(m[1]), c = double(m[2]), d = double(m[3]);
  Vec2 v;
  if (b != 0.0)
    v = {b, mu - a};
  else if (c != 0.0)
    v = {mu - d, c};
  else
    v = (std::fabs(mu - a) < std::fabs(mu - d)) ? Vec2{1, 0} : Vec2{0, 1};
  double n = norm(v);
  v = (1.0 / n) * v;
  if (v.x < 0 || (v.x == 0 && v.y < 0)) v = -v;
  return v;
}

std::int64_t imod(std::int64_t v, std::int64_t n) {
  std::int64_t r = v % n;
  return r < 0 ? r + n : r;
}

bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

Vec2 canonical_quotient(Vec2 v) {
  Vec2 a{mod1(v.x), mod1(v.y)};
  Vec2 b{mod1(-v.x), mod1(-v.y)};
  return lex_less(b, a) ? b : a;
}

Rational canonical_rational(const SystemModel& sys, std::int64_t nx, std::int64_t ny,
                            std::int64_t den) {
  Rational r{den, imod(nx, den), imod(ny, den)};
  if (sys.kind == ModelKind::sphere_pa) {
    Rational s{den, imod(-nx, den), imod(-ny, den)};
    if (s.nx < r.nx || (s.nx == r.nx && s.ny < r.ny)) r = s;
  }
  return r;
}

Point from_rational(const SystemModel& sys, const Rational& r) {
  Point p;
  p.chart = sys.chart();
  p.q = r;
  p.c = {double(r.nx) / double(r.den), double(r.ny) / double(r.den)};
  return p;
}

constexpr double kPi = std::numbers::pi;

// north-south: chart (u, w) with lon = 2 pi u, lat = pi w - pi/2; tau = log tan(pi w / 2)
Vec2 ns_iterate(const SystemModel& sys, Vec2 c, long n) {
  if (c.y <= 0.0 || c.y >= 1.0 || n == 0) return c;
  double tau = std::log(std::tan(kPi * c.y / 2.0));
  tau -= double(n) * std::atanh(sys.ns_a);
  double w = 2.0 / kPi * std::atan(std::exp(tau));
  return {c.x, std::clamp(w, 0.0, 1.0)};
}

Vec2 canonical_geo(Vec2 c) {
  double w = std::clamp(c.y, 0.0, 1.0);
  double u = (w == 0.0 || w == 1.0) ? 0.0 : mod1(c.x);
  return {u, w};
}

double torus_dist(Vec2 a, Vec2 b) { return norm(wrap_half(a - b)); }

double geo_dist(Vec2 a, Vec2 b) {
  double lat1 = kPi * a.y - kPi / 2, lat2 = kPi * b.y - kPi / 2;
  double dlon = 2 * kPi * (a.x - b.x);
  double s1 = std::sin((lat2 - lat1) / 2), s2 = std::sin(dlon / 2);
  double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0))) / kPi;
}

}  // namespace

SystemModel make_model(ModelKind kind, std::array<std::int64_t, 4> m, double c) {
  SystemModel s;
  s.kind = kind;
  s.c = c;
  if (!(c > 0.0 && c < 0.5)) throw CwError(ErrorKind::config, "model.c must lie in (0, 0.5)");
  if (kind == ModelKind::north_south) return s;
  std::int64_t det = m[0] * m[3] - m[1] * m[2];
  if (det != 1 && det != -1)
    throw CwError(ErrorKind::config, "model.matrix must have determinant +-1");
  double t = double(m[0] + m[3]);
  double disc = t * t - 4.0 * double(det);
  if (disc <= 0.0) throw CwError(ErrorKind::config, "model.matrix is not hyperbolic");
  double r = std::sqrt(disc);
  double mu1 = (t + r) / 2.0, mu2 = (t - r) / 2.0;
  if (std::fabs(mu1) < std::fabs(mu2)) std::swap(mu1, mu2);
  if (!(std::fabs(mu1) > 1.0 + 1e-12 && std::fabs(mu2) < 1.0 - 1e-12))
    throw CwError(ErrorKind::config, "model.matrix is not hyperbolic");
  s.m = m;
  s.minv = {det * m[3], -det * m[1], -det * m[2], det * m[0]};
  s.mu_u = mu1;
  s.mu_s = mu2;
  s.e_u = unit_eigvec(m, mu1);
  s.e_s = unit_eigvec(m, mu2);
  return s;
}

Point project_chart(Chart chart, Vec2 v) {
  Point p;
  p.chart = chart;
  switch (chart) {
    case Chart::torus: p.c = {mod1(v.x), mod1(v.y)}; break;
    case Chart::sphere_quotient: p.c = canonical_quotient(v); break;
    case Chart::sphere_geographic: p.c = canonical_geo(v); break;
  }
  return p;
}

Point project(const SystemModel& sys, Vec2 lifted) { return project_chart(sys.chart(), lifted); }

Point make_point(const SystemModel& sys, double x, double y) { return project(sys, {x, y}); }

Point rational_point(const SystemModel& sys, std::int64_t nx, std::int64_t ny, std::int64_t den) {
  if (den <= 0) throw CwError(ErrorKind::domain, "rational denominator must be positive");
  if (!sys.linear()) throw CwError(ErrorKind::unsupported, "rational points need a linear model");
  return from_rational(sys, canonical_rational(sys, nx, ny, den));
}

Vec2 apply_linear(const SystemModel& sys, Vec2 v, long n) {
  const auto& m = n >= 0 ? sys.m : sys.minv;
  const double a = double(m[0]), b = double(m[1]), c = double(m[2]), d = double(m[3]);
  for (long i = 0, k = std::labs(n); i < k; ++i) v = {a * v.x + b * v.y, c * v.x + d * v.y};
  return v;
}

Point iterate(const SystemModel& sys, const Point& x, long n) {
  if (std::labs(n) > sys.horizon)
    throw CwError(ErrorKind::horizon, "iterate: |n| = " + std::to_string(std::labs(n)) +
                                          " exceeds horizon " + std::to_string(sys.horizon));
  if (x.chart != sys.chart()) throw CwError(ErrorKind::chart_mismatch, "iterate: chart mismatch");
  if (sys.kind == ModelKind::north_south) {
    Point r;
    r.chart = x.chart;
    r.c = canonical_geo(ns_iterate(sys, x.c, n));
    return r;
  }
  const auto& m = n >= 0 ? sys.m : sys.minv;
  const long k = std::labs(n);
  if (x.q.valid()) {
    const std::int64_t N = x.q.den;
    std::int64_t u = x.q.nx, v = x.q.ny;
    for (long i = 0; i < k; ++i) {
      std::int64_t nu = imod(m[0] * u + m[1] * v, N);
      std::int64_t nv = imod(m[2] * u + m[3] * v, N);
      u = nu;
      v = nv;
    }
    return from_rational(sys, canonical_rational(sys, u, v, N));
  }
  const double a = double(m[0]), b = double(m[1]), c = double(m[2]), d = double(m[3]);
  double u = x.c.x, v = x.c.y;
  for (long i = 0; i < k; ++i) {
    double nu = a * u + b * v;
    double nv = c * u + d * v;
    u = mod1(nu);
    v = mod1(nv);
  }
  return project(sys, {u, v});
}

double chart_distance(const Point& a, const Point& b) {
  if (a.chart != b.chart) throw CwError(ErrorKind::chart_mismatch, "distance: chart mismatch");
  switch (a.chart) {
    case Chart::torus: return torus_dist(a.c, b.c);
    case Chart::sphere_quotient: return std::min(torus_dist(a.c, b.c), torus_dist(a.c, -b.c));
    case Chart::sphere_geographic: return geo_dist(a.c, b.c);
  }
  return 0.0;
}

double distance(const SystemModel& sys, const Point& a, const Point& b) {
  if (a.chart != sys.chart() || b.chart != sys.chart())
    throw CwError(ErrorKind::chart_mismatch, "distance: point chart does not match model");
  return chart_distance(a, b);
}

Vec2 nearest_lift(Chart chart, Vec2 v, Vec2 ref) {
  Vec2 w = ref + wrap_half(v - ref);
  if (chart != Chart::sphere_quotient) return w;
  Vec2 w2 = ref + wrap_half(-v - ref);
  return norm(w2 - ref) < norm(w - ref) ? w2 : w;
}

std::vector<Vec2> lifted_steps(const std::vector<Point>& pts) {
  std::vector<Vec2> w;
  if (pts.size() < 2) return w;
  w.reserve(pts.size() - 1);
  const Chart chart = pts.front().chart;
  double sigma = 1.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    Vec2 prev = sigma * pts[k].c;
    if (chart == Chart::sphere_geographic) {
      w.push_back(pts[k + 1].c - pts[k].c);
      continue;
    }
    Vec2 plus = wrap_half(pts[k + 1].c - prev);
    if (chart == Chart::sphere_quotient) {
      Vec2 minus = wrap_half(-pts[k + 1].c - prev);
      if (norm(minus) < norm(plus)) {
        w.push_back(minus);
        sigma = -1.0;
        continue;
      }
    }
    w.push_back(plus);
    sigma = 1.0;
  }
  return w;
}

std::vector<Vec2> lift_polyline(const std::vector<Point>& pts) {
  std::vector<Vec2> out;
  if (pts.empty()) return out;
  out.reserve(pts.size());
  out.push_back(pts.front().c);
  for (Vec2 s : lifted_steps(pts)) out.push_back(out.back() + s);
  return out;
}

std::vector<Vec2> lift_of(const MarkedContinuum& C) {
  if (C.lift.size() == C.vertices.size()) return C.lift;
  return lift_polyline(C.vertices);
}

std::vector<Vec2> steps_of(const MarkedContinuum& C) {
  if (C.micro.size() == C.vertices.size() && C.size() > 1) {
    std::vector<Vec2> w;
    for (std::size_t k = 0; k + 1 < C.micro.size(); ++k) w.push_back(C.micro[k + 1] - C.micro[k]);
    return w;
  }
  if (C.lift.size() != C.vertices.size()) return lifted_steps(C.vertices);
  std::vector<Vec2> w;
  for (std::size_t k = 0; k + 1 < C.lift.size(); ++k) w.push_back(C.lift[k + 1] - C.lift[k]);
  return w;
}

std::vector<Point> sphere_spines(const SystemModel& sys) {
  return {make_point(sys, 0, 0), make_point(sys, 0.5, 0), make_point(sys, 0, 0.5),
          make_point(sys, 0.5, 0.5)};
}

MarkedContinuum local_arc(const SystemModel& sys, const Point& x, ArcKind kind, double eps,
                          int resolution) {
  if (!sys.linear())
    throw CwError(ErrorKind::unsupported, "local_arc: north-south has no hyperbolic arcs");
  if (x.chart != sys.chart()) throw CwError(ErrorKind::chart_mismatch, "local_arc: chart");
  if (!(eps > 0.0) || eps >= sys.c)
    throw CwError(ErrorKind::calibration, "local_arc: eps must lie in (0, c)");
  if (resolution < 2) throw CwError(ErrorKind::domain, "local_arc: resolution must be >= 2");
  const Vec2 e = kind == ArcKind::stable ? sys.e_s : sys.e_u;
  const Vec2 xl = x.c;
  MarkedContinuum arc;

  if (sys.kind == ModelKind::sphere_pa) {
    const double fold_tol = 1e-12;
    for (int i = int(std::floor(2 * xl.x)) - 1; i <= int(std::floor(2 * xl.x)) + 2; ++i) {
      for (int j = int(std::floor(2 * xl.y)) - 1; j <= int(std::floor(2 * xl.y)) + 2; ++j) {
        Vec2 h{0.5 * i, 0.5 * j};
        Vec2 r = xl - h;
        double a = dot(r, e);
        double b = cross(e, r);
        if (std::fabs(b) > fold_tol || std::fabs(a) > eps) continue;
        const double sgn = a >= 0 ? 1.0 : -1.0;
        const double len = std::fabs(a) + eps;
        const int n = std::max(resolution, 2);
        bool placed = false;
        for (int k = 0; k < n; ++k) {
          double t = len * double(k) / double(n - 1);
          if (!placed && t >= std::fabs(a)) {
            placed = true;
            arc.vertices.push_back(x);
            arc.lift.push_back(xl);
            if (t == std::fabs(a)) continue;
          }
          arc.vertices.push_back(project(sys, h + (sgn * t) * e));
          arc.lift.push_back(h + (sgn * t) * e);
        }
        arc.mark_p = 0;
        arc.mark_q = arc.vertices.size() - 1;
        return arc;
      }
    }
  }

  int n = resolution;
  if (n > 2 && n % 2 == 0) ++n;
  for (int k = 0; k < n; ++k) {
    if (n > 2 && k == (n - 1) / 2) {
      arc.vertices.push_back(x);
      arc.lift.push_back(xl);
      continue;
    }
    double t = -eps + 2.0 * eps * double(k) / double(n - 1);
    arc.vertices.push_back(project(sys, xl + t * e));
    arc.lift.push_back(xl + t * e);
  }
  arc.mark_p = 0;
  arc.mark_q = arc.vertices.size() - 1;
  return arc;
}

bool is_spine(const SystemModel& sys, const Point& x, double eps, double tol) {
  MarkedContinuum arc = local_arc(sys, x, ArcKind::stable, eps, 3);
  return chart_distance(x, arc.vertices.front()) <= tol ||
         chart_distance(x, arc.vertices.back()) <= tol;
}

}  // namespace cwdyn
