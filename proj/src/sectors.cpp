#include "cwdyn/sectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cwdyn {

namespace {

constexpr int kEdgeSamples = 16;

Vec2 eig(const SystemModel& sys, Vec2 v) { return {dot(v, sys.e_u), dot(v, sys.e_s)}; }

Vec2 from_eig(const SystemModel& sys, Vec2 h, double a, double b) {
  return h + a * sys.e_u + b * sys.e_s;
}

Vec2 z_of(const SystemModel& sys, const Point& h, Vec2 v) {
  return eig(sys, nearest_lift(sys.chart(), v, h.c) - h.c);
}

Vec2 square(Vec2 z) { return {z.x * z.x - z.y * z.y, 2.0 * z.x * z.y}; }

MarkedContinuum oriented(MarkedContinuum C) {
  if (C.mark_p != 0) {
    std::reverse(C.vertices.begin(), C.vertices.end());
    std::reverse(C.lift.begin(), C.lift.end());
    std::reverse(C.micro.begin(), C.micro.end());
    C.mark_p = 0;
    C.mark_q = C.vertices.size() - 1;
  }
  return C;
}

double arc_length(const MarkedContinuum& C) {
  double len = 0.0;
  for (const auto& s : steps_of(C)) len += norm(s);
  return len;
}

// lifted point at arclength s from the first vertex, clamped to the arc
Vec2 lifted_at(const MarkedContinuum& C, double s) {
  const auto lifts = lift_of(C);
  const auto steps = steps_of(C);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    double l = norm(steps[k]);
    if (s <= l || k + 1 == steps.size()) return lifts[k] + (l > 0 ? std::min(s / l, 1.0) : 0.0) * steps[k];
    s -= l;
  }
  return lifts.front();
}

double arclength_of(const MarkedContinuum& C, const Point& x) {
  PolylinePos pos = locate(C, x);
  const auto steps = steps_of(C);
  double s = 0.0;
  for (std::size_t k = 0; k < pos.edge && k < steps.size(); ++k) s += norm(steps[k]);
  if (pos.edge < steps.size()) s += pos.t * norm(steps[pos.edge]);
  return s;
}

// closed boundary loop a1 -> a2 along the stable side, back along the unstable side
std::vector<Vec2> loop_lifts(const SectorRecord& s) {
  std::vector<Vec2> out;
  auto add = [&](const MarkedContinuum& C, bool reverse) {
    auto lifts = lift_of(C);
    auto steps = steps_of(C);
    std::vector<Vec2> pts;
    for (std::size_t k = 0; k < steps.size(); ++k)
      for (int i = 0; i < kEdgeSamples; ++i) pts.push_back(lifts[k] + (double(i) / kEdgeSamples) * steps[k]);
    pts.push_back(lifts.back());
    if (reverse) std::reverse(pts.begin(), pts.end());
    out.insert(out.end(), pts.begin(), pts.end() - 1);
  };
  add(s.boundary_s, false);
  add(s.boundary_u, true);
  return out;
}

struct SectorChart {
  const SystemModel& sys;
  bool branched;
  Point ref;
  Vec2 operator()(Vec2 v) const {
    if (branched) return square(z_of(sys, ref, v));
    return nearest_lift(sys.chart(), v, ref.c);
  }
};

SectorChart chart_for(const SystemModel& sys, const SectorRecord& s) {
  if (s.spine) return {sys, true, *s.spine};
  return {sys, false, s.a1};
}

bool in_polygon(const std::vector<Vec2>& poly, Vec2 p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Vec2 a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

double shoelace(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) s += cross(poly[j], poly[i]);
  return 0.5 * std::fabs(s);
}

std::vector<Vec2> mapped_loop(const SectorRecord& s, const SectorChart& ch) {
  std::vector<Vec2> poly;
  for (Vec2 v : loop_lifts(s)) poly.push_back(ch(v));
  return poly;
}

// spine whose branched chart sees the loop wind around it
bool encloses_spine(const SystemModel& sys, const SectorRecord& s, const Point& h) {
  std::vector<Vec2> poly;
  for (Vec2 v : loop_lifts(s)) {
    Vec2 z = z_of(sys, h, v);
    if (norm(z) >= 0.25) return false;
    poly.push_back(square(z));
  }
  return in_polygon(poly, {0.0, 0.0});
}

double loop_distance(const SectorRecord& s, const Point& x) {
  return std::min(locate(s.boundary_s, x).dist, locate(s.boundary_u, x).dist);
}

enum class Side { inward, outward };

Side continuation_side(const SystemModel& sys, const SectorRecord& s, const SectorChart& ch,
                       const std::vector<Vec2>& poly, const Point& e, const MarkedContinuum& ext,
                       const MarkedContinuum& side) {
  const double tol = 1e-9;
  if (locate(ext, e).dist > tol)
    throw CwError(ErrorKind::off_continuum, "classify_sector: endpoint off its continuation arc");
  const double total = arc_length(ext);
  const double se = arclength_of(ext, e);
  const double tau = 0.1 * arc_length(side);
  if (!(tau > 0)) throw CwError(ErrorKind::indeterminate, "classify_sector: degenerate boundary arc");
  double cand[2] = {se - tau, se + tau};
  int cont = -1;
  for (int i = 0; i < 2; ++i) {
    if (cand[i] < -tol || cand[i] > total + tol) continue;
    Point pt = project(sys, lifted_at(ext, cand[i]));
    if (locate(side, pt).dist > 1e-6 * tau) {
      if (cont >= 0) throw CwError(ErrorKind::indeterminate, "classify_sector: boundary arc not found");
      cont = i;
    }
  }
  if (cont < 0) throw CwError(ErrorKind::indeterminate, "classify_sector: no continuation past endpoint");
  Point c = project(sys, lifted_at(ext, cand[cont]));
  if (loop_distance(s, c) <= 1e-3 * tau)
    throw CwError(ErrorKind::indeterminate, "classify_sector: continuation tangent to boundary");
  return in_polygon(poly, ch(c.c)) ? Side::inward : Side::outward;
}

std::vector<Point> spines_of(const SystemModel& sys, double eps) {
  if (sys.kind != ModelKind::sphere_pa) return {};
  return enumerate_spines(sys, eps, 16);
}

}  // namespace

std::vector<Point> enumerate_spines(const SystemModel& sys, double eps, int grid_res) {
  if (!sys.linear()) throw CwError(ErrorKind::unsupported, "enumerate_spines: model has no leaves");
  if (grid_res < 2 || grid_res % 2 != 0)
    throw CwError(ErrorKind::domain, "enumerate_spines: grid resolution must be even");
  std::vector<Point> out;
  for (int i = 0; i < grid_res; ++i) {
    for (int j = 0; j < grid_res; ++j) {
      Point x = make_point(sys, double(i) / grid_res, double(j) / grid_res);
      if (!is_spine(sys, x, eps, 1e-12)) continue;
      bool dup = std::any_of(out.begin(), out.end(),
                             [&](const Point& y) { return chart_distance(x, y) < 0.5 / grid_res; });
      if (!dup) out.push_back(x);
    }
  }
  return out;
}

std::optional<SectorRecord> make_sector(const SystemModel& sys, const MarkedContinuum& s_arc,
                                        const MarkedContinuum& u_arc, double tol) {
  (void)sys;
  auto pts = intersect(s_arc, u_arc, tol);
  if (pts.size() != 2) return std::nullopt;
  SectorRecord r;
  r.a1 = pts[0];
  r.a2 = pts[1];
  r.ext_s = s_arc;
  r.ext_u = u_arc;
  r.boundary_s = oriented(subcontinuum(s_arc, r.a1, r.a2, tol));
  r.boundary_u = oriented(subcontinuum(u_arc, r.a1, r.a2, tol));
  return r;
}

SectorRecord spine_sector(const SystemModel& sys, const Point& h, double A, double B) {
  if (!(A > 0) || !(B > 0)) throw CwError(ErrorKind::domain, "spine_sector: sides must be positive");
  auto S = local_arc(sys, project(sys, from_eig(sys, h.c, A, 0)), ArcKind::stable, 2 * B, 2);
  auto U = local_arc(sys, project(sys, from_eig(sys, h.c, 0, B)), ArcKind::unstable, 2 * A, 2);
  auto r = make_sector(sys, S, U);
  if (!r) throw CwError(ErrorKind::domain, "spine_sector: arcs do not cross twice");
  if (encloses_spine(sys, *r, h)) r->spine = h;
  r->regular = classify_sector(sys, *r) == SectorKind::regular;
  return *r;
}

SectorKind classify_sector(const SystemModel& sys, const SectorRecord& s) {
  const SectorChart ch = chart_for(sys, s);
  const auto poly = mapped_loop(s, ch);
  for (const Point* e : {&s.a1, &s.a2}) {
    if (continuation_side(sys, s, ch, poly, *e, s.ext_s, s.boundary_s) == Side::inward ||
        continuation_side(sys, s, ch, poly, *e, s.ext_u, s.boundary_u) == Side::inward)
      return SectorKind::non_regular;
  }
  return SectorKind::regular;
}

bool sector_contains(const SystemModel& sys, const SectorRecord& s, const Point& x) {
  const SectorChart ch = chart_for(sys, s);
  return in_polygon(mapped_loop(s, ch), ch(x.c));
}

double sector_area(const SystemModel& sys, const SectorRecord& s) {
  return shoelace(mapped_loop(s, chart_for(sys, s)));
}

SectorSearch find_sectors(const SystemModel& sys, const Region& region, double eps, long budget,
                          int seed_res) {
  if (!sys.linear()) throw CwError(ErrorKind::unsupported, "find_sectors: model has no leaves");
  if (seed_res < 2) throw CwError(ErrorKind::domain, "find_sectors: seed resolution must be >= 2");
  SectorSearch out;
  const auto spines = spines_of(sys, eps);
  std::vector<Point> seeds;
  for (int i = 0; i < seed_res; ++i)
    for (int j = 0; j < seed_res; ++j)
      seeds.push_back(make_point(sys, region.x0 + (i + 0.5) / seed_res * (region.x1 - region.x0),
                                 region.y0 + (j + 0.5) / seed_res * (region.y1 - region.y0)));
  std::vector<MarkedContinuum> S, U;
  for (const auto& x : seeds) {
    S.push_back(local_arc(sys, x, ArcKind::stable, eps, 2));
    U.push_back(local_arc(sys, x, ArcKind::unstable, eps, 2));
  }
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      if (chart_distance(seeds[i], seeds[j]) > 2 * eps) continue;
      if (out.pairs >= budget) {
        out.partial = true;
        return out;
      }
      ++out.pairs;
      auto pts = intersect(S[i], U[j]);
      out.max_multiplicity = std::max<long>(out.max_multiplicity, long(pts.size()));
      if (pts.size() != 2) continue;
      auto rec = make_sector(sys, S[i], U[j]);
      if (!rec) continue;
      bool dup = std::any_of(out.sectors.begin(), out.sectors.end(), [&](const SectorRecord& o) {
        return (chart_distance(o.a1, rec->a1) < 1e-9 && chart_distance(o.a2, rec->a2) < 1e-9) ||
               (chart_distance(o.a1, rec->a2) < 1e-9 && chart_distance(o.a2, rec->a1) < 1e-9);
      });
      if (dup) continue;
      for (const auto& h : spines)
        if (encloses_spine(sys, *rec, h)) rec->spine = h;
      try {
        rec->regular = classify_sector(sys, *rec) == SectorKind::regular;
      } catch (const CwError&) {
        rec->regular = false;
      }
      out.sectors.push_back(std::move(*rec));
    }
  }
  return out;
}

std::vector<SectorRecord> minimal_sectors(const SystemModel& sys, const std::vector<SectorRecord>& all,
                                          const std::vector<Point>& spines) {
  std::vector<SectorRecord> out;
  for (const auto& h : spines) {
    const SectorRecord* best = nullptr;
    double best_area = std::numeric_limits<double>::infinity();
    for (const auto& s : all) {
      if (!s.spine || chart_distance(*s.spine, h) > 1e-9) continue;
      double a = sector_area(sys, s);
      if (a < best_area) best_area = a, best = &s;
    }
    if (best) out.push_back(*best);
  }
  return out;
}

ParametrizationReport sector_parametrization(const SystemModel& sys, const SectorRecord& s,
                                             int grid) {
  if (!s.spine || !s.regular)
    throw CwError(ErrorKind::domain, "sector_parametrization: needs a regular sector with a spine");
  if (grid < 2) throw CwError(ErrorKind::domain, "sector_parametrization: grid must be >= 2");
  const Point h = *s.spine;
  const Vec2 z1 = z_of(sys, h, s.a1.c);
  const double sa = z1.x >= 0 ? 1.0 : -1.0, sb = z1.y >= 0 ? 1.0 : -1.0;
  const double len_s = arc_length(s.boundary_s), len_u = arc_length(s.boundary_u);
  const double R = 1.25 * std::max(len_s, len_u);
  if (R >= sys.c) throw CwError(ErrorKind::domain, "sector_parametrization: sector too large");

  // frame where a1 sits in the first quadrant and b >= 0
  auto frame = [&](Vec2 v, bool first) {
    Vec2 z = z_of(sys, h, v);
    z = {sa * z.x, sb * z.y};
    if (z.y < -1e-13 || (z.y <= 1e-13 && (first ? z.x < 0 : z.x > 0))) z = -z;
    return z;
  };

  ParametrizationReport rep;
  rep.grid = grid;
  auto run = [&](bool first, std::vector<Point>& out) {
    std::vector<Vec2> zs;
    for (int i = 0; i < grid; ++i) {
      const double t = (first ? 0.0 : 0.5) + 0.5 * i / (grid - 1);
      Point gs = project(sys, lifted_at(s.boundary_s, t * len_s));
      auto cu = local_arc(sys, gs, ArcKind::unstable, R, 2);
      for (int j = 0; j < grid; ++j) {
        const double u = (first ? 0.0 : 0.5) + 0.5 * j / (grid - 1);
        Point gu = project(sys, lifted_at(s.boundary_u, u * len_u));
        auto cs = local_arc(sys, gu, ArcKind::stable, R, 2);
        auto pts = intersect(cu, cs);
        if (pts.empty()) {
          ++rep.missing;
          out.push_back(gs);
          zs.push_back(frame(gs.c, first));
          continue;
        }
        std::size_t pick = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pts.size(); ++k) {
          double a = frame(pts[k].c, first).x;
          double score = first ? a : -a;
          if (score > best) best = score, pick = k;
        }
        out.push_back(pts[pick]);
        zs.push_back(frame(pts[pick].c, first));
      }
    }
    const double slack = 1e-12;
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const Vec2 z = zs[i * grid + j];
        if (j + 1 < grid) {
          if (zs[i * grid + j + 1].x > z.x + slack) ++rep.monotone_violations;
          rep.max_modulus = std::max(rep.max_modulus, chart_distance(out[i * grid + j], out[i * grid + j + 1]));
        }
        if (i + 1 < grid) {
          const double db = zs[(i + 1) * grid + j].y - z.y;
          if (first ? db > slack : db < -slack) ++rep.monotone_violations;
          rep.max_modulus = std::max(rep.max_modulus, chart_distance(out[i * grid + j], out[(i + 1) * grid + j]));
        }
      }
    }
    for (std::size_t a = 0; a < out.size(); ++a)
      for (std::size_t b = a + 1; b < out.size(); ++b)
        if (chart_distance(out[a], out[b]) < 1e-12) ++rep.duplicates;
  };
  run(true, rep.f1);
  run(false, rep.f2);
  return rep;
}

EnclosingResult enclosing_sector(const SystemModel& sys, const SectorRecord& s, int margin_budget) {
  if (!s.spine) throw CwError(ErrorKind::domain, "enclosing_sector: sector has no spine");
  EnclosingResult res;
  const Point h = *s.spine;
  const Vec2 z1 = z_of(sys, h, s.a1.c);
  const auto old_loop = loop_lifts(s);
  for (int k = 0; k < margin_budget; ++k) {
    ++res.attempts;
    const double f = 1.0 + 0.5 * std::pow(0.6, k);
    const double Rs = (f + 1.75) * std::fabs(z1.y), Ru = (f + 1.75) * std::fabs(z1.x);
    if (Rs >= sys.c || Ru >= sys.c) {
      res.report = "continuation arcs exceed c";
      continue;
    }
    // walk past a1 along each continuation, then cross with the other family
    Point pu = project(sys, from_eig(sys, h.c, f * z1.x, z1.y));
    Point ps = project(sys, from_eig(sys, h.c, z1.x, f * z1.y));
    if (locate(s.ext_u, pu).dist > 1e-9 || locate(s.ext_s, ps).dist > 1e-9) {
      res.report = "continuation arcs too short";
      continue;
    }
    auto S2 = local_arc(sys, pu, ArcKind::stable, Rs, 2);
    auto U2 = local_arc(sys, ps, ArcKind::unstable, Ru, 2);
    auto rec = make_sector(sys, S2, U2);
    if (!rec) {
      res.report = "extended arcs do not cross twice";
      continue;
    }
    if (!encloses_spine(sys, *rec, h)) {
      res.report = "extended sector misses the spine";
      continue;
    }
    rec->spine = h;
    rec->regular = classify_sector(sys, *rec) == SectorKind::regular;
    double clearance = std::numeric_limits<double>::infinity();
    bool inside = true;
    for (Vec2 v : old_loop) {
      Point x = project(sys, v);
      inside = inside && sector_contains(sys, *rec, x);
      clearance = std::min(clearance, loop_distance(*rec, x));
    }
    if (!inside || !(clearance > 0)) {
      res.report = "extended sector does not contain the input";
      continue;
    }
    res.found = true;
    res.sector = std::move(*rec);
    res.clearance = clearance;
    res.report = "ok";
    return res;
  }
  return res;
}

}  // namespace cwdyn
