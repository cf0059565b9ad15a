#include "cwdyn/continua.hpp"

#include <algorithm>
#include <cmath>

#include "cwdyn/kernels.hpp"

namespace cwdyn {

MarkedContinuum singleton(const Point& p) {
  MarkedContinuum c;
  c.vertices = {p};
  return c;
}

MarkedContinuum polyline(std::vector<Point> pts, std::size_t mark_p, std::size_t mark_q) {
  if (pts.empty()) throw CwError(ErrorKind::domain, "polyline: no vertices");
  if (mark_p >= pts.size() || mark_q >= pts.size())
    throw CwError(ErrorKind::domain, "polyline: mark out of range");
  MarkedContinuum c;
  c.vertices = std::move(pts);
  c.mark_p = mark_p;
  c.mark_q = mark_q;
  return c;
}

double diameter(const MarkedContinuum& C) {
  const std::size_t n = C.size();
  if (n < 2) return 0.0;
  const Chart chart = C.chart();
  if (chart == Chart::sphere_geographic) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        best = std::max(best, chart_distance(C.vertices[i], C.vertices[j]));
    return best;
  }
  std::vector<double> xs(n), ys(n), nx(n), ny(n), d1(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = C.vertices[i].c.x;
    ys[i] = C.vertices[i].c.y;
    nx[i] = -xs[i];
    ny[i] = -ys[i];
  }
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t m = n - i - 1;
    kernels::torus_dist_to(xs.data() + i + 1, ys.data() + i + 1, m, xs[i], ys[i], d1.data());
    if (chart == Chart::sphere_quotient) {
      kernels::torus_dist_to(nx.data() + i + 1, ny.data() + i + 1, m, xs[i], ys[i], d2.data());
      for (std::size_t j = 0; j < m; ++j) best = std::max(best, std::min(d1[j], d2[j]));
    } else {
      for (std::size_t j = 0; j < m; ++j) best = std::max(best, d1[j]);
    }
  }
  return best;
}

namespace {

void image_linear(const SystemModel& sys, const MarkedContinuum& C, long n,
                  std::size_t budget, double bound, MarkedContinuum& out) {
  const auto steps = steps_of(C);
  const auto lifts = lift_of(C);
  std::vector<std::size_t> new_index(C.size());
  Point f0 = iterate(sys, C.vertices[0], n);
  const Vec2 ref = apply_linear(sys, lifts[0], n);
  Vec2 cur = f0.c;
  if (sys.chart() == Chart::sphere_quotient &&
      norm(wrap_half(-f0.c - ref)) < norm(wrap_half(f0.c - ref)))
    cur = -f0.c;
  for (std::size_t k = 0; k < C.size(); ++k) {
    new_index[k] = out.vertices.size();
    out.vertices.push_back(k == 0 ? f0 : iterate(sys, C.vertices[k], n));
    out.lift.push_back(cur);
    if (k + 1 == C.size()) break;
    const Vec2 fw = apply_linear(sys, steps[k], n);
    const double len = norm(fw);
    std::size_t parts = 1;
    while (len / double(parts) > bound) {
      parts *= 2;
      if (out.vertices.size() + parts > budget)
        throw CwError(ErrorKind::budget, "image: refinement exceeds vertex budget");
    }
    for (std::size_t j = 1; j < parts; ++j) {
      Vec2 v = lifts[k] + (double(j) / double(parts)) * steps[k];
      out.vertices.push_back(iterate(sys, project(sys, v), n));
      out.lift.push_back(cur + (double(j) / double(parts)) * fw);
    }
    cur = cur + fw;
  }
  out.mark_p = new_index[C.mark_p];
  out.mark_q = new_index[C.mark_q];
}

void refine_geo(const SystemModel& sys, const Point& a, const Point& b, const Point& fa,
                const Point& fb, long n, double bound, int depth, std::size_t budget,
                std::vector<Point>& out) {
  if (chart_distance(fa, fb) <= bound || depth > 40) return;
  Vec2 mid = 0.5 * (a.c + b.c);
  if (std::fabs(a.c.x - b.c.x) > 0.5) mid.x += 0.5;
  Point m = project(sys, mid);
  Point fm = iterate(sys, m, n);
  refine_geo(sys, a, m, fa, fm, n, bound, depth + 1, budget, out);
  out.push_back(fm);
  if (out.size() > budget) throw CwError(ErrorKind::budget, "image: vertex budget exceeded");
  refine_geo(sys, m, b, fm, fb, n, bound, depth + 1, budget, out);
}

}  // namespace

MarkedContinuum image(const SystemModel& sys, const MarkedContinuum& C, long n,
                      std::size_t vertex_budget, double step_bound) {
  if (n == 0) return C;
  MarkedContinuum out;
  out.closed = C.closed;
  if (sys.linear()) {
    image_linear(sys, C, n, vertex_budget, step_bound, out);
    return out;
  }
  std::vector<std::size_t> new_index(C.size());
  Point prev_f;
  for (std::size_t k = 0; k < C.size(); ++k) {
    Point fk = iterate(sys, C.vertices[k], n);
    if (k > 0)
      refine_geo(sys, C.vertices[k - 1], C.vertices[k], prev_f, fk, n, step_bound, 0,
                 vertex_budget, out.vertices);
    new_index[k] = out.vertices.size();
    out.vertices.push_back(fk);
    prev_f = fk;
  }
  out.mark_p = new_index[C.mark_p];
  out.mark_q = new_index[C.mark_q];
  return out;
}

namespace {

struct Seg {
  Vec2 a;
  Vec2 w;
};

double point_seg_dist(Vec2 p, const Seg& s, double* t_out = nullptr) {
  double ww = dot(s.w, s.w);
  double t = ww > 0 ? std::clamp(dot(p - s.a, s.w) / ww, 0.0, 1.0) : 0.0;
  if (t_out) *t_out = t;
  return norm(p - (s.a + t * s.w));
}

void push_unique(std::vector<Point>& out, const Point& p, double tol) {
  for (const auto& q : out)
    if (chart_distance(p, q) <= tol) return;
  out.push_back(p);
}

// intersections of s1 with a lifted copy s2
void seg_hits(const Seg& s1, const Seg& s2, Chart chart, double tol, std::vector<Point>& out) {
  const double den = cross(s1.w, s2.w);
  const double l1 = norm(s1.w), l2 = norm(s2.w);
  if (std::fabs(den) > 1e-14 * std::max(1e-300, l1 * l2)) {
    Vec2 r = s2.a - s1.a;
    double s = cross(r, s2.w) / den;
    double t = cross(r, s1.w) / den;
    double es = l1 > 0 ? tol / l1 : 0.0, et = l2 > 0 ? tol / l2 : 0.0;
    if (s >= -es && s <= 1 + es && t >= -et && t <= 1 + et) {
      s = std::clamp(s, 0.0, 1.0);
      push_unique(out, project_chart(chart, s1.a + s * s1.w), tol);
    }
    return;
  }
  // parallel: endpoint tangencies
  for (Vec2 p : {s2.a, s2.a + s2.w}) {
    double t;
    if (point_seg_dist(p, s1, &t) <= tol) push_unique(out, project_chart(chart, s1.a + t * s1.w), tol);
  }
  for (Vec2 p : {s1.a, s1.a + s1.w})
    if (point_seg_dist(p, s2) <= tol) push_unique(out, project_chart(chart, p), tol);
}

std::vector<Seg> segments(const MarkedContinuum& C) {
  std::vector<Seg> s;
  auto lifts = lift_of(C);
  auto steps = steps_of(C);
  for (std::size_t k = 0; k < steps.size(); ++k) s.push_back({lifts[k], steps[k]});
  if (C.size() == 1) s.push_back({lifts[0], {0, 0}});
  return s;
}

}  // namespace

std::vector<Point> intersect(const MarkedContinuum& A, const MarkedContinuum& B, double tol) {
  if (A.chart() != B.chart()) throw CwError(ErrorKind::chart_mismatch, "intersect: charts differ");
  const Chart chart = A.chart();
  if (chart == Chart::sphere_geographic)
    throw CwError(ErrorKind::unsupported, "intersect: geographic chart not supported");
  std::vector<Point> out;
  const auto sa = segments(A), sb = segments(B);
  for (const Seg& s1 : sa) {
    Vec2 mid1 = s1.a + 0.5 * s1.w;
    for (const Seg& s2 : sb) {
      for (double sg : {1.0, -1.0}) {
        if (sg < 0 && chart != Chart::sphere_quotient) continue;
        Seg base{sg * s2.a, sg * s2.w};
        Vec2 mid2 = base.a + 0.5 * base.w;
        Vec2 shift = wrap_half(mid2 - mid1) - (mid2 - mid1);
        for (int i = -1; i <= 1; ++i)
          for (int j = -1; j <= 1; ++j) {
            Seg cand{base.a + shift + Vec2{double(i), double(j)}, base.w};
            seg_hits(s1, cand, chart, tol, out);
          }
      }
    }
  }
  return out;
}

PolylinePos locate(const MarkedContinuum& C, const Point& x) {
  PolylinePos best;
  best.dist = 1e300;
  if (C.size() == 1) {
    best.dist = chart_distance(C.vertices[0], x);
    best.point = C.vertices[0];
    return best;
  }
  const auto lifts = lift_of(C);
  const auto steps = steps_of(C);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const Vec2 mid = lifts[k] + 0.5 * steps[k];
    for (double sg : {1.0, -1.0}) {
      if (sg < 0 && C.chart() != Chart::sphere_quotient) continue;
      Vec2 xl = mid + wrap_half(sg * x.c - mid);
      double t;
      double d = point_seg_dist(xl, {lifts[k], steps[k]}, &t);
      if (d < best.dist) {
        best.dist = d;
        best.edge = k;
        best.t = t;
      }
    }
  }
  const std::size_t k = best.edge;
  if (best.t <= 0.0)
    best.point = C.vertices[k];
  else if (best.t >= 1.0)
    best.point = C.vertices[k + 1];
  else
    best.point = project_chart(C.chart(), lifts[k] + best.t * steps[k]);
  return best;
}

MarkedContinuum subcontinuum(const MarkedContinuum& C, const Point& a, const Point& b,
                             double tol) {
  PolylinePos pa = locate(C, a), pb = locate(C, b);
  if (pa.dist > tol || pb.dist > tol)
    throw CwError(ErrorKind::off_continuum, "subcontinuum: point not on the continuum");
  if (C.size() == 1) return singleton(C.vertices[0]);
  auto key = [](const PolylinePos& p) {
    return p.t >= 1.0 ? std::pair<double, double>{double(p.edge + 1), 0.0}
                      : std::pair<double, double>{double(p.edge), p.t};
  };
  const bool swapped = key(pb) < key(pa);
  const PolylinePos& lo = swapped ? pb : pa;
  const PolylinePos& hi = swapped ? pa : pb;
  auto [le, lt] = key(lo);
  auto [he, ht] = key(hi);
  const auto lifts = lift_of(C);
  const auto steps = steps_of(C);
  auto lifted_at = [&](double e, double t) {
    std::size_t k = std::size_t(e);
    return t > 0.0 ? lifts[k] + t * steps[k] : lifts[k];
  };
  MarkedContinuum out;
  out.vertices.push_back(lo.point);
  out.lift.push_back(lifted_at(le, lt));
  if (le == he && lt == ht) return out;
  for (std::size_t v = std::size_t(le) + 1; double(v) <= he; ++v) {
    out.vertices.push_back(C.vertices[v]);
    out.lift.push_back(lifts[v]);
  }
  if (ht > 0.0) {
    out.vertices.push_back(hi.point);
    out.lift.push_back(lifted_at(he, ht));
  }
  out.mark_p = swapped ? out.vertices.size() - 1 : 0;
  out.mark_q = swapped ? 0 : out.vertices.size() - 1;
  return out;
}

double hausdorff(const MarkedContinuum& A, const MarkedContinuum& B) {
  auto one_side = [](const MarkedContinuum& X, const MarkedContinuum& Y) {
    double worst = 0.0;
    for (const auto& p : X.vertices) worst = std::max(worst, locate(Y, p).dist);
    return worst;
  };
  return std::max(one_side(A, B), one_side(B, A));
}

}  // namespace cwdyn
